//! The double-exponential bound recurrence.
//!
//! With `xi_1 = 1` and, for `k >= 2`,
//!
//! ```text
//! beta_k      = 8 k xi_{k-1}^2
//! delta_{k,k} = 0
//! delta_{k,j} = beta_k + 2 delta_{k,j+1} + 2 xi_{k-1} (k xi_{k-1} + k + 2) + 2   (j = k-1 .. 0)
//! xi_k        = 2^{k+2} (delta_{k,0} + 2 xi_{k-1} + 1)
//! ```

use num_bigint::BigUint;
use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundRow {
    pub k: usize,
    #[serde(serialize_with = "ser_big")]
    pub xi: BigUint,
    #[serde(serialize_with = "ser_opt_big")]
    pub beta: Option<BigUint>,
    /// `delta[j]` for `j = 0..=k`; empty for `k = 1`.
    #[serde(serialize_with = "ser_big_vec")]
    pub delta: Vec<BigUint>,
}

fn ser_big<S: serde::Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

fn ser_opt_big<S: serde::Serializer>(v: &Option<BigUint>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(b) => s.serialize_str(&b.to_string()),
        None => s.serialize_none(),
    }
}

fn ser_big_vec<S: serde::Serializer>(v: &[BigUint], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for b in v {
        seq.serialize_element(&b.to_string())?;
    }
    seq.end()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundTable {
    pub rows: Vec<BoundRow>,
}

impl BoundTable {
    pub fn k_max(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, k: usize) -> &BoundRow {
        &self.rows[k - 1]
    }

    pub fn xi(&self, k: usize) -> &BigUint {
        &self.row(k).xi
    }

    pub fn beta(&self, k: usize) -> Option<&BigUint> {
        self.row(k).beta.as_ref()
    }

    pub fn delta(&self, k: usize, j: usize) -> Option<&BigUint> {
        self.row(k).delta.get(j)
    }

    /// Aligned decimal listing, one quantity per line.
    pub fn to_text(&self) -> String {
        let mut lines: Vec<(String, String)> = Vec::new();
        for r in &self.rows {
            lines.push((format!("xi_{}", r.k), r.xi.to_string()));
            if let Some(b) = &r.beta {
                lines.push((format!("beta_{}", r.k), b.to_string()));
            }
            for (j, d) in r.delta.iter().enumerate().rev() {
                lines.push((format!("delta_{},{}", r.k, j), d.to_string()));
            }
        }
        let w = lines.iter().map(|(n, _)| n.len()).max().unwrap_or(0);
        let vw = lines.iter().map(|(_, v)| v.len()).max().unwrap_or(0);
        lines.iter().map(|(n, v)| format!("{n:<w$}  {v:>vw$}\n")).collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("bound table serializes")
    }
}

/// Evaluate the recurrence exactly for `k = 1..=k_max`.
pub fn compute_bounds(k_max: usize) -> BoundTable {
    assert!(k_max >= 1, "k_max must be at least 1");
    let mut rows = vec![BoundRow { k: 1, xi: BigUint::from(1u32), beta: None, delta: vec![] }];
    for k in 2..=k_max {
        let prev = rows[k - 2].xi.clone();
        let kb = BigUint::from(k);
        let beta = BigUint::from(8u32) * &kb * &prev * &prev;
        let step = BigUint::from(2u32) * &prev * (&kb * &prev + &kb + BigUint::from(2u32)) + BigUint::from(2u32);
        let mut delta = vec![BigUint::from(0u32); k + 1];
        for j in (0..k).rev() {
            delta[j] = &beta + BigUint::from(2u32) * &delta[j + 1] + &step;
        }
        let xi = (BigUint::from(1u32) << (k + 2)) * (&delta[0] + BigUint::from(2u32) * &prev + BigUint::from(1u32));
        rows.push(BoundRow { k, xi, beta: Some(beta), delta });
    }
    BoundTable { rows }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn base_case() {
        let t = compute_bounds(1);
        assert_eq!(t.xi(1), &BigUint::from(1u32));
        assert!(t.beta(1).is_none());
    }

    #[test]
    fn k2_chain() {
        let t = compute_bounds(2);
        assert_eq!(t.beta(2).unwrap(), &BigUint::from(16u32));
        assert_eq!(t.delta(2, 2).unwrap(), &BigUint::from(0u32));
        assert_eq!(t.delta(2, 1).unwrap(), &BigUint::from(30u32));
        assert_eq!(t.delta(2, 0).unwrap(), &BigUint::from(90u32));
        assert_eq!(t.xi(2), &BigUint::from(1488u32));
    }

    #[test]
    fn delta_kk_is_zero() {
        let t = compute_bounds(5);
        for k in 2..=5 {
            assert_eq!(t.delta(k, k).unwrap(), &BigUint::from(0u32));
        }
    }

    #[test]
    fn text_lists_every_row() {
        let txt = compute_bounds(2).to_text();
        assert!(txt.contains("xi_2"));
        assert!(txt.contains("1488"));
        assert!(txt.contains("delta_2,0"));
    }
}
