//! Deterministic symbol-to-symbol maps: the bottleneck `f` in `x̃_p = f(x_p)`.

use crate::error::{Error, Result};
use crate::pmf::Alphabet;

/// A total function from one alphabet into another, stored as an index table.
///
/// Models an information bottleneck acting on the prediction signal — most
/// prominently the b-bit uniform quantizer — but any total map works.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeterministicMap {
    input: Alphabet,
    output: Alphabet,
    /// `table[input_index] = output_index`; total by construction.
    table: Vec<usize>,
}

impl DeterministicMap {
    /// Builds a map from an explicit index table, checking totality and range.
    pub fn new(input: Alphabet, output: Alphabet, table: Vec<usize>) -> Result<Self> {
        if table.len() != input.len() {
            return Err(Error::invalid(format!(
                "map table has {} entries for an input alphabet of size {}",
                table.len(),
                input.len()
            )));
        }
        if let Some(&bad) = table.iter().find(|&&t| t >= output.len()) {
            return Err(Error::invalid(format!(
                "map table entry {bad} is outside the output alphabet of size {}",
                output.len()
            )));
        }
        Ok(DeterministicMap {
            input,
            output,
            table,
        })
    }

    /// Builds a map by evaluating `f` on every input symbol; `f` must return
    /// symbols inside the output alphabet.
    pub fn from_fn(
        input: Alphabet,
        output: Alphabet,
        f: impl Fn(i32) -> i32,
    ) -> Result<Self> {
        let table = input
            .symbols()
            .map(|s| {
                output.index_of(f(s)).ok_or_else(|| {
                    Error::invalid(format!(
                        "map sends symbol {s} to {}, outside the output alphabet",
                        f(s)
                    ))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(DeterministicMap {
            input,
            output,
            table,
        })
    }

    /// The identity map on an alphabet (a bottleneck that loses nothing).
    pub fn identity(alphabet: Alphabet) -> Self {
        DeterministicMap {
            input: alphabet,
            output: alphabet,
            table: (0..alphabet.len()).collect(),
        }
    }

    /// The constant map sending everything to one symbol (total information
    /// loss).
    pub fn constant(input: Alphabet, output_symbol: i32) -> Result<Self> {
        let output = Alphabet::new(output_symbol, 1)?;
        Ok(DeterministicMap {
            input,
            output,
            table: vec![0; input.len()],
        })
    }

    pub fn input(&self) -> Alphabet {
        self.input
    }

    pub fn output(&self) -> Alphabet {
        self.output
    }

    /// Output index for an input index.
    pub fn map_index(&self, input_index: usize) -> usize {
        self.table[input_index]
    }

    /// Output symbol for an input symbol, if the input symbol is in range.
    pub fn map_symbol(&self, symbol: i32) -> Option<i32> {
        self.input
            .index_of(symbol)
            .map(|i| self.output.symbol(self.table[i]))
    }
}
