use std::fmt;
use std::str::FromStr;

use crate::error::Error;
use crate::rng::SeedStream;

/// Arrival order of the ground set.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum OrderMode {
    /// Ids in increasing order, i.e. the order labels first appear in the file.
    #[default]
    File,
    /// Fisher-Yates shuffle seeded by the run seed.
    Shuffle,
}

impl FromStr for OrderMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "file" => Ok(OrderMode::File),
            "shuffle" => Ok(OrderMode::Shuffle),
            other => Err(Error::validation(format!(
                "unknown order `{other}` (expected file or shuffle)"
            ))),
        }
    }
}

impl fmt::Display for OrderMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OrderMode::File => "file",
            OrderMode::Shuffle => "shuffle",
        })
    }
}

pub fn stream_order(n: usize, mode: OrderMode, seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    if mode == OrderMode::Shuffle {
        SeedStream::new(seed).shuffle(&mut order);
    }
    order
}
