//! q-integers, Hikita's transition probabilities and the matching weights
//! for the sampling process.
//!
//! `q` is a positive rational throughout so every quantity is exact.

use num_bigint::BigInt;
use num_traits::{One, Pow, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// `[m]_q = 1 + q + ... + q^(m-1)`, with `[0]_q = 0`.
pub fn q_int(m: u64, q: &Rational) -> Result<Rational> {
    if !q.is_positive() {
        return Err(Error::domain(format!("q must be positive, got {q}")));
    }
    Ok(q_int_unchecked(m, q))
}

fn q_int_unchecked(m: u64, q: &Rational) -> Rational {
    let value = if q.is_one() {
        Rational::from_integer(BigInt::from(m))
    } else {
        (pow(q, m) - Rational::one()) / (q - Rational::one())
    };
    debug_assert!(m > 64 || value == q_int_termwise(m, q));
    value
}

fn pow(q: &Rational, e: u64) -> Rational {
    Pow::pow(q, e)
}

fn q_int_termwise(m: u64, q: &Rational) -> Rational {
    let mut acc = Rational::zero();
    let mut term = Rational::one();
    for _ in 0..m {
        acc += &term;
        term *= q;
    }
    acc
}

/// The `2n` positive integers `a_1, b_1, ..., a_n, b_n` and a positive `q`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HikitaParams {
    a: Vec<u64>,
    b: Vec<u64>,
    #[serde(with = "rational::serde_str")]
    q: Rational,
}

impl HikitaParams {
    pub fn new(a: Vec<u64>, b: Vec<u64>, q: Rational) -> Result<Self> {
        if a.is_empty() {
            return Err(Error::domain("n must be at least 1"));
        }
        if a.len() != b.len() {
            return Err(Error::domain(format!(
                "a has {} entries but b has {}",
                a.len(),
                b.len()
            )));
        }
        if let Some(i) = a.iter().chain(&b).position(|&x| x == 0) {
            let (name, j) = if i < a.len() { ("a", i) } else { ("b", i - a.len()) };
            return Err(Error::domain(format!("{name}_{} must be positive", j + 1)));
        }
        if !q.is_positive() {
            return Err(Error::domain(format!("q must be positive, got {q}")));
        }
        Ok(HikitaParams { a, b, q })
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }

    pub fn a(&self) -> &[u64] {
        &self.a
    }

    pub fn b(&self) -> &[u64] {
        &self.b
    }

    pub fn q(&self) -> &Rational {
        &self.q
    }

    /// `prefix[i] = sum_{j <= i} (a_j + b_j)`, with `prefix[0] = 0`.
    fn prefix_sums(&self) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.n() + 1);
        out.push(0);
        for (a, b) in self.a.iter().zip(&self.b) {
            out.push(out.last().unwrap() + a + b);
        }
        out
    }
}

impl<'de> Deserialize<'de> for HikitaParams {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum QField {
            Text(String),
            Int(i64),
        }
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Raw {
            a: Vec<i64>,
            b: Vec<i64>,
            q: QField,
        }
        use serde::de::Error as _;
        let raw = Raw::deserialize(d)?;
        let q = match raw.q {
            QField::Text(s) => rational::parse_rational(&s).map_err(D::Error::custom)?,
            QField::Int(i) => rational::int(i),
        };
        let to_u64 = |v: Vec<i64>, name: &str| -> std::result::Result<Vec<u64>, D::Error> {
            v.into_iter()
                .map(|x| {
                    u64::try_from(x).map_err(|_| D::Error::custom(format!("{name} entries must be positive")))
                })
                .collect()
        };
        HikitaParams::new(to_u64(raw.a, "a")?, to_u64(raw.b, "b")?, q).map_err(D::Error::custom)
    }
}

/// Hikita's `phi_k` by the product formula.
pub fn hikita_phi(params: &HikitaParams, k: usize) -> Result<Rational> {
    let n = params.n();
    if k > n {
        return Err(Error::domain(format!("k = {k} is outside 0..={n}")));
    }
    let s = params.prefix_sums();
    let q = params.q();
    let qi = |m: u64| q_int_unchecked(m, q);
    let mut phi = Rational::one();
    // i runs 1-based; a[i-1] is a_i and s[i] is the sum through i.
    for i in 1..=k {
        let num = pow(q, params.a[i - 1]) * qi(params.b[i - 1] + s[k] - s[i]);
        phi *= num / qi(s[k] - s[i - 1]);
    }
    for i in k + 1..=n {
        phi *= qi(params.a[i - 1] + s[i - 1] - s[k]) / qi(s[i] - s[k]);
    }
    Ok(phi)
}

/// `[phi_0, ..., phi_n]`, checked to be positive and to sum to exactly 1.
pub fn hikita_distribution(params: &HikitaParams) -> Result<Vec<Rational>> {
    let phis = (0..=params.n())
        .map(|k| hikita_phi(params, k))
        .collect::<Result<Vec<_>>>()?;
    if let Some(k) = phis.iter().position(|p| !p.is_positive()) {
        return Err(Error::contradiction(format!("phi_{k} = {} is not positive", phis[k])));
    }
    let total: Rational = phis.iter().sum();
    if !total.is_one() {
        return Err(Error::contradiction(format!("phi_k sum to {total}, not 1")));
    }
    Ok(phis)
}

/// Strictly positive weights `w_1, ..., w_m`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct WeightVector {
    #[serde(with = "rational::serde_str::vec")]
    weights: Vec<Rational>,
}

impl WeightVector {
    pub fn new(weights: Vec<Rational>) -> Result<Self> {
        if let Some(i) = weights.iter().position(|w| !w.is_positive()) {
            return Err(Error::domain(format!("weight w_{} is not positive", i + 1)));
        }
        Ok(WeightVector { weights })
    }

    pub fn from_integers(weights: &[i64]) -> Result<Self> {
        WeightVector::new(weights.iter().map(|&w| rational::int(w)).collect())
    }

    pub fn uniform(m: usize) -> Self {
        WeightVector { weights: vec![Rational::one(); m] }
    }

    pub fn as_slice(&self) -> &[Rational] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn total(&self) -> Rational {
        self.weights.iter().sum()
    }
}

/// Geometric blocks: `w_{2i-1}` covers `a_i` consecutive powers of `q` and
/// `w_{2i}` the next `b_i`, starting at exponent 0.
pub fn weights_from_params(params: &HikitaParams) -> WeightVector {
    let q = params.q();
    let mut weights = Vec::with_capacity(2 * params.n());
    let mut offset = Rational::one();
    for (&a, &b) in params.a.iter().zip(&params.b) {
        for len in [a, b] {
            weights.push(&offset * q_int_unchecked(len, q));
            offset *= pow(q, len);
        }
    }
    WeightVector { weights }
}
