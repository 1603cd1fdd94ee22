//! Computing machines realized by optimal engines on structured ensembles.

pub mod oscillator;
pub mod flow;
pub mod radix;
pub mod three_level;
pub mod majority;
pub mod knapsack;
