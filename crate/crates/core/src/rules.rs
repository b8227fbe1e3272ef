//! Local transition rules `phi: Sigma^N x Sigma -> [0,1]`, their validation,
//! the plain-text rule file format, and the standard example constructors.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::lattice::{Neighbourhood, Site};
use crate::matrix::Matrix;
use crate::measures::{decode, encode, state_count};
use crate::scalar::{convert, Scalar};

pub type Symbol = u8;

/// A single-site distribution `q` on `{0, ..., sigma-1}`.
#[derive(Clone, PartialEq, Debug)]
pub struct Marginal<T> {
    weights: Vec<T>,
}

impl<T: Scalar> Marginal<T> {
    pub fn new(weights: Vec<T>) -> Result<Self> {
        if weights.len() < 2 {
            return Err(invalid("alphabet needs at least two symbols"));
        }
        if weights.len() > Symbol::MAX as usize + 1 {
            return Err(invalid("alphabet too large"));
        }
        if weights.iter().any(|w| *w < T::zero()) {
            return Err(invalid("negative marginal weight"));
        }
        let total = weights.iter().fold(T::zero(), |a, w| a + w.clone());
        if !total.approx_eq(&T::one()) {
            return Err(invalid(format!("marginal sums to {total}, not 1")));
        }
        Ok(Marginal { weights })
    }

    pub fn uniform(sigma: usize) -> Self {
        let w = T::one() / T::from_usize_lossless(sigma);
        Marginal { weights: vec![w; sigma] }
    }

    /// `"uniform"` or comma-separated literals such as `9/10,1/10`.
    pub fn parse(text: &str, sigma: usize) -> Result<Self> {
        let text = text.trim();
        if text.eq_ignore_ascii_case("uniform") {
            return Ok(Marginal::uniform(sigma));
        }
        let weights = text
            .split(',')
            .map(|s| T::parse_literal(s).ok_or_else(|| Error::Parse(format!("bad probability {s:?}"))))
            .collect::<Result<Vec<T>>>()?;
        if weights.len() != sigma {
            return Err(invalid(format!("q has {} weights, alphabet has {sigma}", weights.len())));
        }
        Marginal::new(weights)
    }

    pub fn sigma(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn weight(&self, a: Symbol) -> &T {
        &self.weights[a as usize]
    }

    pub fn q_min(&self) -> T {
        self.weights.iter().cloned().fold(T::one(), |m, w| if w < m { w } else { m })
    }

    pub fn is_strictly_positive(&self) -> bool {
        self.weights.iter().all(|w| *w > T::zero())
    }

    pub fn convert<U: Scalar>(&self) -> Marginal<U> {
        Marginal { weights: self.weights.iter().map(convert::<T, U>).collect() }
    }
}

/// Outcome of checking a candidate table.
#[derive(Clone, Debug)]
pub struct ValidationReport<T> {
    /// `(row, actual sum)` for rows that do not sum to one.
    pub row_sum_violations: Vec<(usize, T)>,
    /// `(row, column)` of negative entries.
    pub negative_entries: Vec<(usize, usize)>,
    pub strictly_positive: bool,
}

impl<T> ValidationReport<T> {
    pub fn is_valid(&self) -> bool {
        self.row_sum_violations.is_empty() && self.negative_entries.is_empty()
    }
}

/// Checks shape, sign and row sums of a candidate table (row order = pattern index).
pub fn validate_table<T: Scalar>(sigma: usize, nbhd: &Neighbourhood, rows: &[Vec<T>]) -> Result<ValidationReport<T>> {
    if sigma < 2 || sigma > Symbol::MAX as usize + 1 {
        return Err(Error::MalformedRule(format!("alphabet size {sigma} out of range")));
    }
    let expected = state_count(sigma, nbhd.size())?;
    if rows.len() != expected {
        return Err(Error::MalformedRule(format!("expected {expected} rows, found {}", rows.len())));
    }
    if let Some(i) = rows.iter().position(|r| r.len() != sigma) {
        return Err(Error::MalformedRule(format!("row {i} has {} entries, expected {sigma}", rows[i].len())));
    }
    let mut report = ValidationReport { row_sum_violations: vec![], negative_entries: vec![], strictly_positive: true };
    for (i, row) in rows.iter().enumerate() {
        for (b, x) in row.iter().enumerate() {
            if *x < T::zero() {
                report.negative_entries.push((i, b));
            }
            if *x <= T::zero() {
                report.strictly_positive = false;
            }
        }
        let sum = row.iter().fold(T::zero(), |a, x| a + x.clone());
        if !sum.approx_eq(&T::one()) {
            report.row_sum_violations.push((i, sum));
        }
    }
    Ok(report)
}

/// A homogeneous local rule with an ordered neighbourhood.
///
/// Row `i` of the table is the distribution of the new symbol when the
/// neighbourhood reads the word with [`encode`] value `i` (first offset most
/// significant).
#[derive(Clone, PartialEq, Debug)]
pub struct LocalRule<T> {
    sigma: usize,
    nbhd: Neighbourhood,
    table: Vec<T>,
    strictly_positive: bool,
}

impl<T: Scalar> LocalRule<T> {
    pub fn new(sigma: usize, nbhd: Neighbourhood, rows: Vec<Vec<T>>) -> Result<Self> {
        let report = validate_table(sigma, &nbhd, &rows)?;
        if let Some((i, sum)) = report.row_sum_violations.first() {
            return Err(Error::MalformedRule(format!("row {i} sums to {sum}")));
        }
        if let Some((i, b)) = report.negative_entries.first() {
            return Err(Error::MalformedRule(format!("negative entry at row {i}, column {b}")));
        }
        Ok(LocalRule { sigma, nbhd, table: rows.into_iter().flatten().collect(), strictly_positive: report.strictly_positive })
    }

    /// Builds the table from a function of the neighbourhood word.
    pub fn from_fn(sigma: usize, nbhd: Neighbourhood, f: impl Fn(&[Symbol]) -> Vec<T>) -> Result<Self> {
        let n_rows = state_count(sigma, nbhd.size())?;
        let rows = (0..n_rows).map(|i| f(&decode(i, nbhd.size(), sigma))).collect();
        LocalRule::new(sigma, nbhd, rows)
    }

    pub fn sigma(&self) -> usize {
        self.sigma
    }

    pub fn dimension(&self) -> usize {
        self.nbhd.dim()
    }

    pub fn neighbourhood(&self) -> &Neighbourhood {
        &self.nbhd
    }

    pub fn row_count(&self) -> usize {
        self.table.len() / self.sigma
    }

    pub fn row(&self, index: usize) -> &[T] {
        &self.table[index * self.sigma..(index + 1) * self.sigma]
    }

    pub fn prob(&self, index: usize, b: Symbol) -> &T {
        &self.table[index * self.sigma + b as usize]
    }

    pub fn rows(&self) -> Vec<Vec<T>> {
        self.table.chunks(self.sigma).map(|c| c.to_vec()).collect()
    }

    pub fn is_strictly_positive(&self) -> bool {
        self.strictly_positive
    }

    pub fn min_entry(&self) -> T {
        self.table.iter().cloned().fold(T::one(), |m, x| if x < m { x } else { m })
    }

    /// Row index of a neighbourhood word.
    pub fn pattern_index(&self, word: &[Symbol]) -> Result<usize> {
        if word.len() != self.nbhd.size() {
            return Err(invalid(format!("word has {} symbols, neighbourhood has {}", word.len(), self.nbhd.size())));
        }
        if let Some(&s) = word.iter().find(|&&s| s as usize >= self.sigma) {
            return Err(invalid(format!("symbol {s} out of range for alphabet of size {}", self.sigma)));
        }
        Ok(encode(word, self.sigma))
    }

    pub fn convert<U: Scalar>(&self) -> LocalRule<U> {
        LocalRule {
            sigma: self.sigma,
            nbhd: self.nbhd.clone(),
            table: self.table.iter().map(convert::<T, U>).collect(),
            strictly_positive: self.strictly_positive,
        }
    }

    pub fn to_file(&self, mode: NumericMode) -> RuleFile {
        let table = self
            .table
            .chunks(self.sigma)
            .map(|row| {
                row.iter()
                    .map(|x| match mode {
                        NumericMode::Rational => Entry::Text(convert::<T, num_rational::BigRational>(x).to_literal()),
                        NumericMode::Float => Entry::Number(
                            serde_json::Number::from_f64(x.to_f64_lossy()).expect("finite probability"),
                        ),
                    })
                    .collect()
            })
            .collect();
        RuleFile {
            alphabet_size: self.sigma,
            dimension: self.dimension(),
            neighbourhood: self.nbhd.offsets().iter().map(|o| o.0.clone()).collect(),
            mode,
            table,
        }
    }

    pub fn from_file(file: &RuleFile) -> Result<Self> {
        let nbhd = Neighbourhood::new(
            file.dimension,
            file.neighbourhood.iter().map(|c| Site(c.clone())).collect(),
        )
        .map_err(|e| Error::MalformedRule(e.to_string()))?;
        let rows = file
            .table
            .iter()
            .map(|row| row.iter().map(|e| e.parse::<T>(file.mode)).collect::<Result<Vec<T>>>())
            .collect::<Result<Vec<_>>>()?;
        LocalRule::new(file.alphabet_size, nbhd, rows)
    }

    pub fn to_json(&self, mode: NumericMode) -> String {
        serde_json::to_string_pretty(&self.to_file(mode)).expect("rule file serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        LocalRule::from_file(&RuleFile::parse(text)?)
    }
}

pub fn validate_rule<T: Scalar>(rule: &LocalRule<T>) -> ValidationReport<T> {
    validate_table(rule.sigma, &rule.nbhd, &rule.rows()).expect("constructed rules are well-shaped")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NumericMode {
    Rational,
    Float,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Text(String),
    Number(serde_json::Number),
}

impl Entry {
    fn parse<T: Scalar>(&self, mode: NumericMode) -> Result<T> {
        let text = match (self, mode) {
            (Entry::Text(s), NumericMode::Rational) => s.clone(),
            (Entry::Number(n), NumericMode::Float) => n.to_string(),
            (Entry::Text(s), NumericMode::Float) => {
                return Err(Error::MalformedRule(format!("float-mode entry must be a number, got {s:?}")))
            }
            (Entry::Number(n), NumericMode::Rational) => {
                return Err(Error::MalformedRule(format!("rational-mode entry must be a \"p/q\" string, got {n}")))
            }
        };
        T::parse_literal(&text).ok_or_else(|| Error::MalformedRule(format!("bad probability {text:?}")))
    }
}

/// On-disk rule format (JSON object; unknown fields are rejected).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RuleFile {
    pub alphabet_size: usize,
    pub dimension: usize,
    pub neighbourhood: Vec<Vec<i64>>,
    pub mode: NumericMode,
    pub table: Vec<Vec<Entry>>,
}

impl RuleFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }
}

fn check_open_unit<T: Scalar>(eps: &T, upper_inclusive: Option<T>) -> Result<()> {
    let ok = match upper_inclusive {
        Some(u) => *eps > T::zero() && *eps <= u,
        None => *eps > T::zero() && *eps < T::one(),
    };
    if ok {
        Ok(())
    } else {
        Err(invalid(format!("noise parameter {eps} out of range")))
    }
}

/// Binary rule on `N = (0, 1)`: new symbol is `w0 xor w1` with probability `1 - eps`.
pub fn xor_noise<T: Scalar>(eps: T) -> Result<LocalRule<T>> {
    check_open_unit(&eps, None)?;
    let keep = T::one() - eps.clone();
    LocalRule::from_fn(2, Neighbourhood::line(&[0, 1])?, |w| {
        let x = (w[0] ^ w[1]) as usize;
        let mut row = vec![eps.clone(), eps.clone()];
        row[x] = keep.clone();
        row
    })
}

/// Like [`xor_noise`] but the noise always writes `1`: `(1 - eps) delta_xor + eps delta_1`.
/// Uniform Bernoulli is not stationary for it.
pub fn biased_xor<T: Scalar>(eps: T) -> Result<LocalRule<T>> {
    check_open_unit(&eps, None)?;
    let keep = T::one() - eps.clone();
    LocalRule::from_fn(2, Neighbourhood::line(&[0, 1])?, |w| {
        let mut row = vec![T::zero(), T::zero()];
        row[(w[0] ^ w[1]) as usize] = keep.clone();
        row[1] = row[1].clone() + eps.clone();
        row
    })
}

/// Binary rule on `N = (-1, 0, 1)`: with probability `eps` copy the right
/// neighbour, with probability `eps` copy the flipped left neighbour, else keep.
///
/// Uniform Bernoulli is stationary for its continuous-time dynamics but not
/// preserved by any single-site update. The table has zero entries.
pub fn copy_flip<T: Scalar>(eps: T) -> Result<LocalRule<T>> {
    check_open_unit(&eps, Some(T::ratio(1, 2)))?;
    let stay = T::one() - eps.clone() - eps.clone();
    LocalRule::from_fn(2, Neighbourhood::line(&[-1, 0, 1])?, |w| {
        let mut row = vec![T::zero(), T::zero()];
        row[w[2] as usize] = row[w[2] as usize].clone() + eps.clone();
        row[(1 - w[0]) as usize] = row[(1 - w[0]) as usize].clone() + eps.clone();
        row[w[1] as usize] = row[w[1] as usize].clone() + stay.clone();
        row
    })
}

/// [`copy_flip`] without the flip: copies the left neighbour as is.
pub fn copy_plain<T: Scalar>(eps: T) -> Result<LocalRule<T>> {
    check_open_unit(&eps, Some(T::ratio(1, 2)))?;
    let stay = T::one() - eps.clone() - eps.clone();
    LocalRule::from_fn(2, Neighbourhood::line(&[-1, 0, 1])?, |w| {
        let mut row = vec![T::zero(), T::zero()];
        row[w[2] as usize] = row[w[2] as usize].clone() + eps.clone();
        row[w[0] as usize] = row[w[0] as usize].clone() + eps.clone();
        row[w[1] as usize] = row[w[1] as usize].clone() + stay.clone();
        row
    })
}

/// Assembles `phi(u a, b) = contexts[u](a, b)` where `a` is the symbol at the
/// last offset of `nbhd` and `u` the word on the remaining offsets.
///
/// Rejects the first context whose matrix does not fix `q`.
pub fn vasilyev_rule<T: Scalar>(nbhd: Neighbourhood, contexts: &[Matrix<T>], q: &Marginal<T>) -> Result<LocalRule<T>> {
    let sigma = q.sigma();
    let ctx_len = nbhd.size() - 1;
    if contexts.len() != state_count(sigma, ctx_len)? {
        return Err(Error::MalformedRule(format!(
            "expected {} context matrices, got {}",
            sigma.pow(ctx_len as u32),
            contexts.len()
        )));
    }
    for (u, m) in contexts.iter().enumerate() {
        if m.rows() != sigma || m.cols() != sigma || !m.is_row_stochastic() {
            return Err(Error::MalformedRule(format!("context {u} is not a stochastic {sigma}x{sigma} matrix")));
        }
        let moved = m.left_apply(q.weights());
        if moved.iter().zip(q.weights()).any(|(a, b)| !a.approx_eq(b)) {
            return Err(Error::NonStationaryContext { context: decode(u, ctx_len, sigma) });
        }
    }
    LocalRule::from_fn(sigma, nbhd, |w| {
        let u = encode(&w[..ctx_len], sigma);
        contexts[u].row(w[ctx_len] as usize).to_vec()
    })
}

/// `phi(w, b) = theta(f(w), b)` for a deterministic local map `f` given as a
/// table over neighbourhood words.
pub fn surjective_ca_noise<T: Scalar>(nbhd: Neighbourhood, f: &[Symbol], theta: &Matrix<T>) -> Result<LocalRule<T>> {
    let sigma = theta.rows();
    if theta.cols() != sigma || !theta.is_row_stochastic() {
        return Err(Error::MalformedRule("theta must be a square stochastic matrix".into()));
    }
    if f.len() != state_count(sigma, nbhd.size())? {
        return Err(Error::MalformedRule(format!("local map needs {} entries", sigma.pow(nbhd.size() as u32))));
    }
    if let Some(s) = f.iter().find(|&&s| s as usize >= sigma) {
        return Err(Error::MalformedRule(format!("local map output {s} out of range")));
    }
    LocalRule::from_fn(sigma, nbhd, |w| theta.row(f[encode(w, sigma)] as usize).to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use num_traits::{One, Zero};

    type Q = BigRational;

    fn r(n: i64, d: i64) -> Q {
        Q::ratio(n, d)
    }

    #[test]
    fn xor_noise_examples() {
        let rule = xor_noise(0.5_f64).unwrap();
        assert!(rule.rows().iter().flatten().all(|&x| x == 0.5));
        let rule = xor_noise(r(1, 10)).unwrap();
        assert_eq!(rule.row(rule.pattern_index(&[0, 0]).unwrap()), &[r(9, 10), r(1, 10)]);
        assert_eq!(rule.row(rule.pattern_index(&[0, 1]).unwrap()), &[r(1, 10), r(9, 10)]);
        let report = validate_rule(&rule);
        assert!(report.is_valid() && report.strictly_positive);
        assert!(xor_noise(0.0).is_err());
        assert!(xor_noise(1.0).is_err());
    }

    #[test]
    fn copy_flip_examples() {
        let rule = copy_flip(r(1, 4)).unwrap();
        assert_eq!(rule.row(rule.pattern_index(&[0, 0, 0]).unwrap()), &[r(3, 4), r(1, 4)]);
        assert_eq!(rule.row(rule.pattern_index(&[0, 1, 1]).unwrap()), &[Q::zero(), Q::one()]);
        let half = copy_flip(r(1, 2)).unwrap();
        assert_eq!(half.row(half.pattern_index(&[1, 0, 1]).unwrap()), &[r(1, 2), r(1, 2)]);
        let report = validate_rule(&rule);
        assert!(report.is_valid() && !report.strictly_positive);
        assert!(copy_flip(r(3, 5)).is_err());
    }

    #[test]
    fn pattern_index_examples() {
        let rule = xor_noise(0.1).unwrap();
        assert_eq!(rule.pattern_index(&[1, 0]).unwrap(), 2);
        assert_eq!(rule.pattern_index(&[0, 0]).unwrap(), 0);
        assert!(rule.pattern_index(&[2, 0]).is_err());
        let n = Neighbourhood::line(&[0, 1]).unwrap();
        let third = 1.0 / 3.0;
        let ternary = LocalRule::from_fn(3, n, |_| vec![third, third, 1.0 - 2.0 * third]).unwrap();
        assert_eq!(ternary.pattern_index(&[2, 1]).unwrap(), 7);
    }

    #[test]
    fn row_sum_violation_reported() {
        let n = Neighbourhood::line(&[0]).unwrap();
        let rows = vec![vec![0.5, 0.5], vec![0.6, 0.3]];
        let report = validate_table(2, &n, &rows).unwrap();
        assert_eq!(report.row_sum_violations.len(), 1);
        assert_eq!(report.row_sum_violations[0].0, 1);
        assert!(LocalRule::new(2, n.clone(), rows).is_err());
        assert!(matches!(validate_table(2, &n, &[vec![1.0, 0.0]]), Err(Error::MalformedRule(_))));
    }

    #[test]
    fn vasilyev_reproduces_xor_noise() {
        let eps = r(1, 10);
        let flip = |a: bool| {
            let keep = Q::one() - eps.clone();
            if a {
                Matrix::from_rows(vec![vec![eps.clone(), keep.clone()], vec![keep, eps.clone()]]).unwrap()
            } else {
                Matrix::from_rows(vec![vec![Q::one() - eps.clone(), eps.clone()], vec![eps.clone(), Q::one() - eps.clone()]]).unwrap()
            }
        };
        let contexts = vec![flip(false), flip(true)];
        let q = Marginal::uniform(2);
        let rule = vasilyev_rule(Neighbourhood::line(&[0, 1]).unwrap(), &contexts, &q).unwrap();
        assert_eq!(rule, xor_noise(eps).unwrap());

        let ident = vec![Matrix::<Q>::identity(2), Matrix::identity(2)];
        let q = Marginal::new(vec![r(1, 3), r(2, 3)]).unwrap();
        let hold = vasilyev_rule(Neighbourhood::line(&[-1, 0]).unwrap(), &ident, &q).unwrap();
        assert!(!hold.is_strictly_positive());

        let bad = vec![Matrix::identity(2), Matrix::from_rows(vec![vec![Q::one(), Q::zero()], vec![Q::one(), Q::zero()]]).unwrap()];
        match vasilyev_rule(Neighbourhood::line(&[-1, 0]).unwrap(), &bad, &q) {
            Err(Error::NonStationaryContext { context }) => assert_eq!(context, vec![1]),
            other => panic!("expected rejection, got {other:?}"),
        }
    }

    #[test]
    fn surjective_ca_noise_examples() {
        let eps = r(1, 10);
        let theta = Matrix::from_rows(vec![
            vec![Q::one() - eps.clone(), eps.clone()],
            vec![eps.clone(), Q::one() - eps.clone()],
        ])
        .unwrap();
        let xor = [0, 1, 1, 0];
        let rule = surjective_ca_noise(Neighbourhood::line(&[0, 1]).unwrap(), &xor, &theta).unwrap();
        assert_eq!(rule, xor_noise(eps).unwrap());
        let det = surjective_ca_noise(Neighbourhood::line(&[0, 1]).unwrap(), &xor, &Matrix::<Q>::identity(2)).unwrap();
        assert_eq!(det.row(1), &[Q::zero(), Q::one()]);
        assert!(surjective_ca_noise(Neighbourhood::line(&[0, 1]).unwrap(), &[0, 1, 2, 0], &theta).is_err());
    }

    #[test]
    fn rule_file_roundtrip() {
        let rule = xor_noise(r(1, 10)).unwrap();
        let text = rule.to_json(NumericMode::Rational);
        assert!(text.contains("\"9/10\""));
        assert_eq!(LocalRule::<Q>::from_json(&text).unwrap(), rule);
        let ftext = rule.to_json(NumericMode::Float);
        assert_eq!(LocalRule::<Q>::from_json(&ftext).unwrap(), rule);
        let back: LocalRule<f64> = LocalRule::from_json(&ftext).unwrap();
        assert_eq!(back.row(0), &[0.9, 0.1]);
    }

    #[test]
    fn rule_file_rejects_unknown_fields_and_mixed_modes() {
        let text = r#"{"alphabet_size":2,"dimension":1,"neighbourhood":[[0]],"mode":"float","table":[[0.5,0.5],[0.5,0.5]],"extra":1}"#;
        assert!(LocalRule::<f64>::from_json(text).is_err());
        let text = r#"{"alphabet_size":2,"dimension":1,"neighbourhood":[[0]],"mode":"float","table":[["1/2","1/2"],[0.5,0.5]]}"#;
        assert!(LocalRule::<f64>::from_json(text).is_err());
        let text = r#"{"alphabet_size":2,"dimension":1,"neighbourhood":[[0]],"mode":"rational","table":[["1/2","1/2"],["1/3","2/3"]]}"#;
        assert!(LocalRule::<Q>::from_json(text).is_ok());
    }

    #[test]
    fn marginal_parsing() {
        let q = Marginal::<Q>::parse("9/10,1/10", 2).unwrap();
        assert_eq!(q.q_min(), r(1, 10));
        assert!(Marginal::<Q>::parse("1/2,1/3", 2).is_err());
        assert!(Marginal::<f64>::parse("1,0", 2).unwrap().q_min() == 0.0);
        assert_eq!(Marginal::<f64>::parse("uniform", 3).unwrap().sigma(), 3);
    }
}
