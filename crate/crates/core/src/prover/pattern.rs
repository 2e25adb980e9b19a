use std::fmt;

use nalgebra::DMatrix;

use super::ProverError;
use crate::tensor::{Bipartition, Ket};
use crate::C64;

/// Name of the reserved symbol for cells no basis state covers.
pub const ZERO_SYMBOL: &str = "0";

/// Grid of symbol ids over a finite alphabet, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PatternMatrix {
    rows: usize,
    cols: usize,
    cells: Vec<usize>,
    alphabet: Vec<String>,
    zero_symbol: Option<usize>,
}

impl PatternMatrix {
    /// Builds a pattern from explicit cells. `zero` names an alphabet entry
    /// that is fixed to zero, if any.
    pub fn new(rows: usize, cols: usize, cells: Vec<usize>, alphabet: Vec<String>, zero: Option<usize>) -> Self {
        assert_eq!(cells.len(), rows * cols, "cell count");
        assert!(cells.iter().all(|&s| s < alphabet.len()), "symbol id out of range");
        Self { rows, cols, cells, alphabet, zero_symbol: zero }
    }

    /// Parses whitespace-separated rows of symbol names.
    pub fn parse(text: &str) -> Self {
        let mut alphabet: Vec<String> = Vec::new();
        let mut cells = Vec::new();
        let mut rows = 0;
        let mut cols = 0;
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            let row: Vec<&str> = line.split_whitespace().collect();
            cols = row.len();
            rows += 1;
            for name in row {
                let id = match alphabet.iter().position(|a| a == name) {
                    Some(i) => i,
                    None => {
                        alphabet.push(name.to_string());
                        alphabet.len() - 1
                    }
                };
                cells.push(id);
            }
        }
        let zero = alphabet.iter().position(|a| a == ZERO_SYMBOL);
        Self::new(rows, cols, cells, alphabet, zero)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn zero_symbol(&self) -> Option<usize> {
        self.zero_symbol
    }

    pub fn cell(&self, r: usize, c: usize) -> usize {
        self.cells[r * self.cols + c]
    }

    pub fn symbol_name(&self, r: usize, c: usize) -> &str {
        &self.alphabet[self.cell(r, c)]
    }

    /// Cell count per alphabet entry.
    pub fn multiplicity(&self) -> Vec<usize> {
        let mut m = vec![0; self.alphabet.len()];
        for &s in &self.cells {
            m[s] += 1;
        }
        m
    }

    /// Same pattern with rows and columns permuted: entry `(r, c)` of the
    /// result is entry `(row_perm[r], col_perm[c])` of `self`.
    pub fn permuted(&self, row_perm: &[usize], col_perm: &[usize]) -> Self {
        let mut cells = Vec::with_capacity(self.cells.len());
        for &r in row_perm {
            for &c in col_perm {
                cells.push(self.cell(r, c));
            }
        }
        Self { rows: row_perm.len(), cols: col_perm.len(), cells, ..self.clone() }
    }
}

impl fmt::Display for PatternMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            let row: Vec<&str> = (0..self.cols).map(|c| self.symbol_name(r, c)).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

/// Pattern of `Σ c_s · basis[s]` across `bp`: each cell carries the symbol
/// of the unique basis state supported there, or [`ZERO_SYMBOL`].
pub fn derive_pattern(basis: &[Ket<f64>], symbols: &[String], bp: Bipartition) -> Result<PatternMatrix, ProverError> {
    if basis.len() != symbols.len() {
        return Err(ProverError::SymbolCountMismatch { states: basis.len(), symbols: symbols.len() });
    }
    let Some(first) = basis.first() else {
        return Err(ProverError::SymbolCountMismatch { states: 0, symbols: symbols.len() });
    };
    let d = first.d();
    let (ra, rb) = (bp.group_a(), bp.group_b());
    let (rows, cols) = (ra.dim(d), rb.dim(d));
    let mut owner: Vec<Option<usize>> = vec![None; rows * cols];
    let (sa, sb) = (ra.parties(), rb.parties());
    let flat = |idx: &[usize; 4], parties: &[usize]| parties.iter().fold(0, |acc, &p| acc * d + idx[p - 1]);
    for (s, ket) in basis.iter().enumerate() {
        if ket.d() != d {
            return Err(crate::tensor::TensorError::DimensionMismatch { left: d, right: ket.d() }.into());
        }
        for (idx, amp) in ket.terms() {
            if (amp.re - 1.0).abs() > 1e-12 || amp.im.abs() > 1e-12 {
                return Err(ProverError::NonUnitAmplitude {
                    label: symbols[s].clone(),
                    index: *idx,
                    re: amp.re,
                    im: amp.im,
                });
            }
            let cell = flat(idx, &sa) * cols + flat(idx, &sb);
            if let Some(prev) = owner[cell] {
                return Err(ProverError::AmbiguousCell {
                    index: *idx,
                    first: symbols[prev].clone(),
                    second: symbols[s].clone(),
                });
            }
            owner[cell] = Some(s);
        }
    }
    let mut alphabet = symbols.to_vec();
    let zero = if owner.iter().any(Option::is_none) {
        alphabet.push(ZERO_SYMBOL.to_string());
        Some(alphabet.len() - 1)
    } else {
        None
    };
    let cells = owner.into_iter().map(|o| o.or(zero).expect("zero symbol present")).collect();
    Ok(PatternMatrix::new(rows, cols, cells, alphabet, zero))
}

/// Numeric matrix with every cell replaced by its symbol's value (the zero
/// symbol, if present, takes value 0 regardless of `values`).
pub fn instantiate(p: &PatternMatrix, values: &[C64]) -> DMatrix<C64> {
    DMatrix::from_fn(p.rows, p.cols, |r, c| {
        let s = p.cell(r, c);
        if Some(s) == p.zero_symbol {
            C64::new(0.0, 0.0)
        } else {
            values[s]
        }
    })
}
