//! Serializable verification records.
//!
//! One [`ConductorReport`] describes one verification case: the field
//! parameters, the element under test, the closed-form prediction, the
//! norm-group oracle value, and reproducibility diagnostics.  The driver
//! emits them as JSON lines; everything except the timing field is a pure
//! function of the run configuration and seed, which is what makes report
//! bodies byte-for-byte reproducible.

use serde::{Deserialize, Serialize};

use crate::field::{FieldCtx, FieldElement};

/// One verification case (or an explicit skip record for a vacuous
/// parameter row).
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct ConductorReport {
    /// Suite that produced the record (metcond | condr0 | condr1 | zetaform
    /// | lemmas | skip).
    pub suite: String,
    pub p: u64,
    pub n: u32,
    pub f: usize,
    /// Working precision (p-adic digits) of the field context.
    pub prec: u32,
    /// Element under test: for each power of the uniformizer (ascending,
    /// starting at λ^0), the base-10 coordinates over the unramified basis.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub element: Option<Vec<Vec<String>>>,
    /// Eigenvalue index of the sampled class, when applicable.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub r: Option<u64>,
    /// Kummer depth of the extension F(x^{1/p^m})/F, when applicable.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub m: Option<u32>,
    /// Closed-form prediction; absent for records with nothing to predict
    /// (skips, pure-oracle checks).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub formula_f: Option<u64>,
    /// First-principles conductor from the norm-group oracle.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub oracle_f: Option<u64>,
    /// Equality of the two values; present exactly when both are.
    #[serde(rename = "match", skip_serializing_if = "Option::is_none", default)]
    pub matches: Option<bool>,
    /// log_p of the norm-span index after each inserted generator
    /// (certificate trace); empty when no norm group was computed.
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub index_trace: Vec<u64>,
    /// Per-row RNG seed actually used for sampling and oracle randomness.
    pub seed: u64,
    /// Wall-clock milliseconds for the case — the only field excluded from
    /// byte-for-byte reproducibility.
    pub ms: u128,
    /// Free-form diagnostics: skip reasons, generator provenance, flagged
    /// formula readings.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub note: Option<String>,
}

impl ConductorReport {
    /// Record for one formula-vs-oracle comparison.  The match flag is
    /// derived, never passed in, so the stored invariant
    /// `match = (formula_f == oracle_f)` holds by construction.
    #[allow(clippy::too_many_arguments)]
    pub fn case(
        suite: &str,
        ctx: &FieldCtx,
        element: &FieldElement,
        r: Option<u64>,
        m: u32,
        formula_f: Option<u64>,
        oracle_f: u64,
        index_trace: Vec<u64>,
        seed: u64,
    ) -> Self {
        ConductorReport {
            suite: suite.to_string(),
            p: ctx.par.p,
            n: ctx.par.n,
            f: ctx.par.f,
            prec: ctx.par.prec,
            element: Some(render_element(ctx, element)),
            r,
            m: Some(m),
            formula_f,
            oracle_f: Some(oracle_f),
            matches: formula_f.map(|ff| ff == oracle_f),
            index_trace,
            seed,
            ms: 0,
            note: None,
        }
    }

    /// Explicit skip record for a parameter row a suite does not apply to.
    pub fn skip(suite: &str, p: u64, n: u32, f: usize, prec: u32, seed: u64, reason: &str) -> Self {
        ConductorReport {
            suite: suite.to_string(),
            p,
            n,
            f,
            prec,
            element: None,
            r: None,
            m: None,
            formula_f: None,
            oracle_f: None,
            matches: None,
            index_trace: Vec::new(),
            seed,
            ms: 0,
            note: Some(format!("skipped: {reason}")),
        }
    }

    /// True unless this record witnesses a formula/oracle disagreement.
    pub fn is_clean(&self) -> bool {
        self.matches.unwrap_or(true)
    }

    /// One JSON line, no trailing newline.
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("report serialization cannot fail")
    }
}

/// Render an element as its coordinate table: `out[i][j]` is the base-10
/// residue of the coefficient of (uniformizer)^i on the j-th unramified
/// basis direction, `i` ascending from 0.
pub fn render_element(ctx: &FieldCtx, x: &FieldElement) -> Vec<Vec<String>> {
    let f = ctx.par.f;
    (0..ctx.e)
        .map(|i| (0..f).map(|j| x.coeffs()[i * f + j].to_string()).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldParams;

    #[test]
    fn report_round_trips_and_derives_match() {
        let ctx = FieldCtx::new(FieldParams { p: 3, n: 1, f: 1, prec: 6 }).unwrap();
        let rep = ConductorReport::case(
            "condr0",
            &ctx,
            &ctx.el_zeta(),
            Some(0),
            1,
            Some(4),
            4,
            vec![3, 1],
            42,
        );
        assert_eq!(rep.matches, Some(true));
        let line = rep.to_json_line();
        assert!(line.contains("\"match\":true"), "serde field is renamed: {line}");
        let back: ConductorReport = serde_json::from_str(&line).unwrap();
        assert_eq!(back, rep);

        let bad = ConductorReport::case(
            "condr0",
            &ctx,
            &ctx.el_zeta(),
            Some(0),
            1,
            Some(4),
            6,
            vec![],
            42,
        );
        assert_eq!(bad.matches, Some(false));
        assert!(!bad.is_clean());
    }

    #[test]
    fn skip_records_have_no_match_flag() {
        let rep = ConductorReport::skip("metcond", 3, 1, 1, 6, 7, "no admissible r");
        assert!(rep.is_clean());
        let line = rep.to_json_line();
        assert!(!line.contains("match"));
        assert!(line.contains("no admissible r"));
    }

    #[test]
    fn element_rendering_is_row_per_uniformizer_power() {
        let ctx = FieldCtx::new(FieldParams { p: 3, n: 1, f: 2, prec: 6 }).unwrap();
        let lam = ctx.el_lambda();
        let table = render_element(&ctx, &lam);
        assert_eq!(table.len(), ctx.e);
        assert_eq!(table[0], vec!["0", "0"]);
        assert_eq!(table[1], vec!["1", "0"]);
    }
}
