//! Core domain types: rosters, observation alphabets, model parameters and
//! per-game round sequences.
//!
//! Everything in here is an immutable value object once constructed, so the
//! types can be shared freely across threads. Matrices are indexed by roster
//! order (states) and alphabet order (symbols) throughout the crate.

use chrono::NaiveDate;
use ndarray::{Array1, Array2};
use thiserror::Error;

use crate::error::{Error, Result};

/// Row-sum tolerance for parameters that are stored or loaded.
pub const STOCHASTIC_TOL: f64 = 1e-9;
/// Row-sum tolerance for freshly renormalized output.
pub const RENORMALIZE_TOL: f64 = 1e-12;

/// One player: an opaque id used as a matrix label plus a display name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Player {
    pub id: String,
    pub name: String,
}

/// Ordered list of players. The ordering is canonical: every matrix in the
/// crate indexes its rows and columns by it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Roster {
    players: Vec<Player>,
}

impl Roster {
    /// Build a roster, rejecting empty rosters and duplicate or empty ids.
    pub fn new(players: Vec<Player>) -> Result<Self> {
        if players.is_empty() {
            return Err(Error::InvalidParams(vec![Violation::EmptyRoster]));
        }
        for (i, p) in players.iter().enumerate() {
            if p.id.is_empty() {
                return Err(Error::InvalidParams(vec![Violation::EmptyLabel { index: i }]));
            }
            if players[..i].iter().any(|q| q.id == p.id) {
                return Err(Error::InvalidParams(vec![Violation::DuplicateLabel {
                    index: i,
                    id: p.id.clone(),
                }]));
            }
        }
        Ok(Self { players })
    }

    /// Convenience constructor from `(id, name)` pairs.
    pub fn from_pairs<I, S, T>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, T)>,
        S: Into<String>,
        T: Into<String>,
    {
        Self::new(
            pairs
                .into_iter()
                .map(|(id, name)| Player {
                    id: id.into(),
                    name: name.into(),
                })
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.players.len()
    }

    pub fn is_empty(&self) -> bool {
        self.players.is_empty()
    }

    pub fn players(&self) -> &[Player] {
        &self.players
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.players.iter().map(|p| p.id.as_str())
    }

    /// Index of the player with the given id, if present.
    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.players.iter().position(|p| p.id == id)
    }

    /// Same player ids in the same order.
    pub fn same_ids(&self, other: &Roster) -> bool {
        self.players.len() == other.players.len()
            && self
                .players
                .iter()
                .zip(&other.players)
                .all(|(a, b)| a.id == b.id)
    }
}

/// Ordered list of observation symbols. For basketball rounds this is the
/// points scored: `["0", "1", "2", "3"]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    symbols: Vec<String>,
}

impl Alphabet {
    pub fn new(symbols: Vec<String>) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::InvalidParams(vec![Violation::EmptyAlphabet]));
        }
        for (i, s) in symbols.iter().enumerate() {
            if symbols[..i].contains(s) {
                return Err(Error::InvalidParams(vec![Violation::DuplicateLabel {
                    index: i,
                    id: s.clone(),
                }]));
            }
        }
        Ok(Self { symbols })
    }

    /// The four point outcomes of one round: 0, 1, 2 or 3.
    pub fn points() -> Self {
        Self {
            symbols: vec!["0".into(), "1".into(), "2".into(), "3".into()],
        }
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }
}

/// Which parameter a [`Violation`] refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixKind {
    Transition,
    Emission,
    Initial,
}

impl std::fmt::Display for MatrixKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MatrixKind::Transition => write!(f, "A"),
            MatrixKind::Emission => write!(f, "B"),
            MatrixKind::Initial => write!(f, "pi"),
        }
    }
}

/// A single violated invariant, with enough location detail to act on.
/// Dimension problems and stochasticity problems are distinct variants.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Violation {
    #[error("{matrix} has shape {actual_rows}x{actual_cols}, expected {rows}x{cols}")]
    Dimension {
        matrix: MatrixKind,
        rows: usize,
        cols: usize,
        actual_rows: usize,
        actual_cols: usize,
    },
    #[error("{matrix} row {row} sums to {sum} (residual {residual:e})")]
    RowSum {
        matrix: MatrixKind,
        row: usize,
        sum: f64,
        residual: f64,
    },
    #[error("{matrix} entry ({row}, {col}) = {value} outside [0, 1]")]
    EntryRange {
        matrix: MatrixKind,
        row: usize,
        col: usize,
        value: f64,
    },
    #[error("roster is empty")]
    EmptyRoster,
    #[error("alphabet is empty")]
    EmptyAlphabet,
    #[error("label at index {index} is empty")]
    EmptyLabel { index: usize },
    #[error("duplicate label {id:?} at index {index}")]
    DuplicateLabel { index: usize, id: String },
    #[error("outcome sequence is empty")]
    EmptySequence,
}

/// The HMM parameter triple: row-stochastic transition matrix `A` (m x m),
/// row-stochastic emission matrix `B` (m x n), initial distribution `pi`.
#[derive(Debug, Clone, PartialEq)]
pub struct HmmParams {
    a: Array2<f64>,
    b: Array2<f64>,
    pi: Array1<f64>,
}

impl HmmParams {
    /// Build a validated parameter set. Every entry must lie in `[0, 1]` and
    /// each row of `A`, each row of `B` and `pi` must sum to 1 within 1e-9.
    pub fn new(a: Array2<f64>, b: Array2<f64>, pi: Array1<f64>) -> Result<Self> {
        let params = Self { a, b, pi };
        let m = params.num_states();
        let n = params.num_symbols();
        params.validate(m, n)?;
        Ok(params)
    }

    /// Build without validation. Intended for tests and loaders that
    /// validate explicitly afterwards.
    pub fn new_unchecked(a: Array2<f64>, b: Array2<f64>, pi: Array1<f64>) -> Self {
        Self { a, b, pi }
    }

    pub fn transition(&self) -> &Array2<f64> {
        &self.a
    }

    pub fn emission(&self) -> &Array2<f64> {
        &self.b
    }

    pub fn initial(&self) -> &Array1<f64> {
        &self.pi
    }

    /// Number of states m (players).
    pub fn num_states(&self) -> usize {
        self.pi.len()
    }

    /// Number of observation symbols n.
    pub fn num_symbols(&self) -> usize {
        self.b.ncols()
    }

    /// Check every invariant against the expected dimensions `(m, n)`.
    pub fn validate(&self, m: usize, n: usize) -> Result<()> {
        let violations = validate_params(self, m, n);
        if violations.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidParams(violations))
        }
    }
}

/// Collect every violated [`HmmParams`] invariant for dimensions `(m, n)`.
/// An empty result means the parameters are valid.
pub fn validate_params(params: &HmmParams, m: usize, n: usize) -> Vec<Violation> {
    let mut violations = Vec::new();

    let a = &params.a;
    let b = &params.b;
    let pi = &params.pi;

    if a.nrows() != m || a.ncols() != m {
        violations.push(Violation::Dimension {
            matrix: MatrixKind::Transition,
            rows: m,
            cols: m,
            actual_rows: a.nrows(),
            actual_cols: a.ncols(),
        });
    }
    if b.nrows() != m || b.ncols() != n {
        violations.push(Violation::Dimension {
            matrix: MatrixKind::Emission,
            rows: m,
            cols: n,
            actual_rows: b.nrows(),
            actual_cols: b.ncols(),
        });
    }
    if pi.len() != m {
        violations.push(Violation::Dimension {
            matrix: MatrixKind::Initial,
            rows: m,
            cols: 1,
            actual_rows: pi.len(),
            actual_cols: 1,
        });
    }

    let check_rows = |matrix: MatrixKind, grid: &Array2<f64>, out: &mut Vec<Violation>| {
        for (r, row) in grid.rows().into_iter().enumerate() {
            for (c, &v) in row.iter().enumerate() {
                if !(0.0..=1.0).contains(&v) || v.is_nan() {
                    out.push(Violation::EntryRange {
                        matrix,
                        row: r,
                        col: c,
                        value: v,
                    });
                }
            }
            let sum: f64 = row.sum();
            let residual = (sum - 1.0).abs();
            if !(residual <= STOCHASTIC_TOL) {
                out.push(Violation::RowSum {
                    matrix,
                    row: r,
                    sum,
                    residual,
                });
            }
        }
    };
    check_rows(MatrixKind::Transition, a, &mut violations);
    check_rows(MatrixKind::Emission, b, &mut violations);

    for (c, &v) in pi.iter().enumerate() {
        if !(0.0..=1.0).contains(&v) || v.is_nan() {
            violations.push(Violation::EntryRange {
                matrix: MatrixKind::Initial,
                row: 0,
                col: c,
                value: v,
            });
        }
    }
    let pi_sum: f64 = pi.sum();
    let residual = (pi_sum - 1.0).abs();
    if !(residual <= STOCHASTIC_TOL) {
        violations.push(Violation::RowSum {
            matrix: MatrixKind::Initial,
            row: 0,
            sum: pi_sum,
            residual,
        });
    }

    violations
}

/// Fallback distribution used for rows with no mass at all.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ZeroRowPolicy {
    /// Spread the row uniformly. Keeps EM well-defined.
    #[default]
    Uniform,
    /// Put all mass on the diagonal entry: a player who never passed keeps
    /// the ball. Falls back to uniform for a zero row without a diagonal.
    SelfLoop,
}

/// A row-normalized matrix plus a record of which rows needed the fallback.
#[derive(Debug, Clone, PartialEq)]
pub struct RenormalizedRows {
    pub matrix: Array2<f64>,
    /// Indices of rows that had no mass and were filled per `policy`.
    pub fallback_rows: Vec<usize>,
    pub policy: ZeroRowPolicy,
}

/// Divide each row of a nonnegative matrix by its sum. Rows that sum to zero
/// are replaced according to `policy` and reported in the result. Negative
/// entries are rejected with their location.
pub fn renormalize_rows(matrix: &Array2<f64>, policy: ZeroRowPolicy) -> Result<RenormalizedRows> {
    let cols = matrix.ncols();
    let mut out = matrix.clone();
    let mut fallback_rows = Vec::new();

    for (r, mut row) in out.rows_mut().into_iter().enumerate() {
        for (c, &v) in row.iter().enumerate() {
            if v < 0.0 || v.is_nan() {
                return Err(Error::NegativeEntry {
                    row: r,
                    col: c,
                    value: v,
                });
            }
        }
        let sum: f64 = row.sum();
        if sum > 0.0 {
            row.mapv_inplace(|v| v / sum);
        } else {
            fallback_rows.push(r);
            match policy {
                ZeroRowPolicy::SelfLoop if r < cols => {
                    row.fill(0.0);
                    row[r] = 1.0;
                }
                _ => row.fill(1.0 / cols as f64),
            }
        }
    }

    Ok(RenormalizedRows {
        matrix: out,
        fallback_rows,
        policy,
    })
}

/// Normalize a nonnegative vector to sum to 1; zero vectors become uniform.
pub(crate) fn renormalize_vec(vec: &Array1<f64>) -> Result<Array1<f64>> {
    for (c, &v) in vec.iter().enumerate() {
        if v < 0.0 || v.is_nan() {
            return Err(Error::NegativeEntry {
                row: 0,
                col: c,
                value: v,
            });
        }
    }
    let sum: f64 = vec.sum();
    if sum > 0.0 {
        Ok(vec / sum)
    } else {
        Ok(Array1::from_elem(vec.len(), 1.0 / vec.len() as f64))
    }
}

/// Win/loss flag for one game.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GameResult {
    Win,
    Loss,
}

/// One game's ordered round outcomes plus identifying metadata. Outcomes are
/// indices into an [`Alphabet`]; validity against a specific alphabet is
/// checked where the two meet (ingest, inference).
#[derive(Debug, Clone, PartialEq)]
pub struct GameSequence {
    game_id: String,
    date: NaiveDate,
    result: GameResult,
    outcomes: Vec<usize>,
}

impl GameSequence {
    pub fn new(
        game_id: impl Into<String>,
        date: NaiveDate,
        result: GameResult,
        outcomes: Vec<usize>,
    ) -> Result<Self> {
        if outcomes.is_empty() {
            return Err(Error::InvalidParams(vec![Violation::EmptySequence]));
        }
        Ok(Self {
            game_id: game_id.into(),
            date,
            result,
            outcomes,
        })
    }

    pub fn game_id(&self) -> &str {
        &self.game_id
    }

    pub fn date(&self) -> NaiveDate {
        self.date
    }

    pub fn result(&self) -> GameResult {
        self.result
    }

    pub fn outcomes(&self) -> &[usize] {
        &self.outcomes
    }

    /// Number of rounds T.
    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    /// Every outcome index fits an alphabet of size `n`.
    pub fn check_alphabet(&self, n: usize) -> Result<()> {
        for (index, &value) in self.outcomes.iter().enumerate() {
            if value >= n {
                return Err(Error::OutcomeOutOfRange {
                    game_id: self.game_id.clone(),
                    index,
                    value,
                    alphabet: n,
                });
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{arr1, arr2};

    fn date() -> NaiveDate {
        NaiveDate::from_ymd_opt(2015, 10, 27).unwrap()
    }

    #[test]
    fn validate_accepts_identity_case() {
        let params = HmmParams::new_unchecked(
            arr2(&[[1.0]]),
            arr2(&[[0.5, 0.5]]),
            arr1(&[1.0]),
        );
        assert!(validate_params(&params, 1, 2).is_empty());
    }

    #[test]
    fn validate_reports_row_sum_violation() {
        let params = HmmParams::new_unchecked(
            arr2(&[[0.6, 0.5], [0.5, 0.5]]),
            arr2(&[[0.5, 0.5], [0.5, 0.5]]),
            arr1(&[0.5, 0.5]),
        );
        let violations = validate_params(&params, 2, 2);
        assert_eq!(violations.len(), 1);
        match &violations[0] {
            Violation::RowSum { matrix, row, sum, .. } => {
                assert_eq!(*matrix, MatrixKind::Transition);
                assert_eq!(*row, 0);
                assert!((sum - 1.1).abs() < 1e-12);
            }
            other => panic!("unexpected violation {other:?}"),
        }
    }

    #[test]
    fn validate_permits_zero_entries() {
        let a = arr2(&[
            [0.5, 0.5, 0.0],
            [0.2, 0.3, 0.5],
            [0.0, 0.0, 1.0],
        ]);
        let b = arr2(&[
            [0.25, 0.25, 0.25, 0.25],
            [0.1, 0.2, 0.3, 0.4],
            [1.0, 0.0, 0.0, 0.0],
        ]);
        let pi = arr1(&[0.5, 0.5, 0.0]);
        let params = HmmParams::new_unchecked(a, b, pi);
        assert!(validate_params(&params, 3, 4).is_empty());
    }

    #[test]
    fn validate_dimension_mismatch_is_distinct() {
        let params = HmmParams::new_unchecked(
            arr2(&[[1.0]]),
            arr2(&[[0.5, 0.5]]),
            arr1(&[1.0]),
        );
        let violations = validate_params(&params, 2, 2);
        assert!(violations
            .iter()
            .all(|v| matches!(v, Violation::Dimension { .. })));
        assert_eq!(violations.len(), 3);
    }

    #[test]
    fn renormalize_divides_by_row_sum() {
        let result = renormalize_rows(&arr2(&[[2.0, 2.0]]), ZeroRowPolicy::Uniform).unwrap();
        assert_eq!(result.matrix, arr2(&[[0.5, 0.5]]));
        assert!(result.fallback_rows.is_empty());
    }

    #[test]
    fn renormalize_zero_row_uniform_fallback() {
        let result =
            renormalize_rows(&arr2(&[[0.0, 0.0], [1.0, 3.0]]), ZeroRowPolicy::Uniform).unwrap();
        assert_eq!(result.matrix, arr2(&[[0.5, 0.5], [0.25, 0.75]]));
        assert_eq!(result.fallback_rows, vec![0]);
    }

    #[test]
    fn renormalize_zero_row_self_loop_fallback() {
        let result =
            renormalize_rows(&arr2(&[[0.0, 0.0], [1.0, 3.0]]), ZeroRowPolicy::SelfLoop).unwrap();
        assert_eq!(result.matrix, arr2(&[[1.0, 0.0], [0.25, 0.75]]));
        assert_eq!(result.fallback_rows, vec![0]);
    }

    #[test]
    fn renormalize_finals_row_c() {
        // Row C of the bundled finals pass matrix; total = 103.
        let row = [10.0, 0.0, 65.0, 2.0, 17.0, 5.0, 1.0, 2.0, 0.0, 1.0, 0.0, 0.0, 0.0];
        let matrix = Array2::from_shape_vec((1, 13), row.to_vec()).unwrap();
        let result = renormalize_rows(&matrix, ZeroRowPolicy::Uniform).unwrap();
        for (c, &v) in row.iter().enumerate() {
            assert_eq!(result.matrix[[0, c]], v / 103.0);
        }
    }

    #[test]
    fn renormalize_rejects_negative_entry() {
        let err = renormalize_rows(&arr2(&[[1.0, -0.5]]), ZeroRowPolicy::Uniform).unwrap_err();
        match err {
            Error::NegativeEntry { row, col, value } => {
                assert_eq!((row, col), (0, 1));
                assert_eq!(value, -0.5);
            }
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn renormalize_is_idempotent() {
        let matrix = arr2(&[[0.3, 0.7, 2.0], [0.0, 0.0, 0.0], [5.0, 1.0, 4.0]]);
        let once = renormalize_rows(&matrix, ZeroRowPolicy::Uniform).unwrap();
        let twice = renormalize_rows(&once.matrix, ZeroRowPolicy::Uniform).unwrap();
        for (a, b) in once.matrix.iter().zip(twice.matrix.iter()) {
            assert!((a - b).abs() <= RENORMALIZE_TOL);
        }
    }

    #[test]
    fn roster_rejects_duplicates_and_blanks() {
        assert!(Roster::from_pairs([("A", "Guard"), ("A", "Center")]).is_err());
        assert!(Roster::from_pairs([("", "Nameless")]).is_err());
        assert!(Roster::from_pairs(Vec::<(String, String)>::new()).is_err());
    }

    #[test]
    fn game_sequence_checks_alphabet() {
        let seq = GameSequence::new("g1", date(), GameResult::Win, vec![0, 1, 3]).unwrap();
        assert!(seq.check_alphabet(4).is_ok());
        let err = seq.check_alphabet(3).unwrap_err();
        match err {
            Error::OutcomeOutOfRange { index, value, .. } => {
                assert_eq!((index, value), (2, 3));
            }
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn game_sequence_rejects_empty_outcomes() {
        assert!(GameSequence::new("g1", date(), GameResult::Loss, vec![]).is_err());
    }
}
