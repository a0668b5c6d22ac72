//! The policy registry: colon-parameterized identifiers so scripts can
//! sweep horizons without bespoke flags.
//!
//! Known forms: `exact2`, `exact3`, `exact4`, `memoryless:<n>`,
//! `asc:<n>[:<c>]`, `stop-first:<n>`.

use std::collections::BTreeMap;

use crate::emit::Json;
use crate::error::{Error, Result};
use crate::exact;
use crate::memoryless::{self, AscCoefficients};
use crate::policy::{Policy, StopFirst};

pub const KNOWN_IDS: &str =
    "exact2, exact3, exact4, memoryless:<n>, asc:<n>[:<c>], stop-first:<n>";

/// A policy built from an identifier, with the parameters that fully
/// determine it (for output provenance).
pub struct RegisteredPolicy {
    pub policy: Box<dyn Policy + Send + Sync>,
    pub params: BTreeMap<String, Json>,
}

fn parse_horizon(text: &str, id: &str) -> Result<usize> {
    text.parse::<usize>()
        .ok()
        .filter(|&n| n >= 1)
        .ok_or_else(|| Error::InvalidInput(format!("bad horizon in policy id '{id}'")))
}

/// Builds a policy from its registry identifier.
pub fn build_policy(id: &str) -> Result<RegisteredPolicy> {
    let mut params = BTreeMap::new();
    params.insert("policy-id".to_string(), Json::Str(id.to_string()));
    let parts: Vec<&str> = id.split(':').collect();
    let policy: Box<dyn Policy + Send + Sync> = match parts.as_slice() {
        ["exact2"] => Box::new(exact::policy2()),
        ["exact3"] => Box::new(exact::policy3()),
        ["exact4"] => Box::new(exact::policy4()),
        ["stop-first", n] => Box::new(StopFirst::new(parse_horizon(n, id)?)?),
        ["memoryless", n] => {
            let n = parse_horizon(n, id)?;
            let (tv, value) = memoryless::optimize(n, 1e-9)?;
            params.insert(
                "thresholds".to_string(),
                Json::Arr(tv.thresholds().iter().map(|&a| Json::Num(a)).collect()),
            );
            params.insert("expected-rank".to_string(), Json::Num(value));
            Box::new(tv)
        }
        ["asc", rest @ ..] if !rest.is_empty() && rest.len() <= 2 => {
            let n = parse_horizon(rest[0], id)?;
            let (coeffs, tv) = if rest.len() == 2 {
                let c: f64 = rest[1]
                    .parse()
                    .map_err(|_| Error::InvalidInput(format!("bad offset in policy id '{id}'")))?;
                let coeffs = AscCoefficients::reference(c);
                let tv = memoryless::asc_thresholds(n, &coeffs)?;
                (coeffs, tv)
            } else {
                let (coeffs, tv, _) =
                    memoryless::tune_asc_offset(n, 1.77, 0.54, -0.27, 0.05, 30.0)?;
                (coeffs, tv)
            };
            params.insert(
                "coefficients".to_string(),
                Json::Arr(vec![
                    Json::Num(coeffs.c0),
                    Json::Num(coeffs.c1),
                    Json::Num(coeffs.c2),
                ]),
            );
            params.insert("offset-c".to_string(), Json::Num(coeffs.c));
            params.insert(
                "expected-rank".to_string(),
                Json::Num(memoryless::expected_rank(&tv)),
            );
            Box::new(tv)
        }
        _ => {
            return Err(Error::InvalidInput(format!(
                "unknown policy id '{id}'; known ids: {KNOWN_IDS}"
            )))
        }
    };
    params.insert(
        "horizon".to_string(),
        Json::UInt(policy.horizon() as u64),
    );
    Ok(RegisteredPolicy { policy, params })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_ids_resolve() {
        for (id, n) in [("exact2", 2), ("exact3", 3), ("exact4", 4)] {
            let reg = build_policy(id).unwrap();
            assert_eq!(reg.policy.horizon(), n);
        }
    }

    #[test]
    fn parameterized_ids_resolve() {
        assert_eq!(build_policy("stop-first:7").unwrap().policy.horizon(), 7);
        assert_eq!(build_policy("memoryless:4").unwrap().policy.horizon(), 4);
        assert_eq!(build_policy("asc:10:1.5").unwrap().policy.horizon(), 10);
    }

    #[test]
    fn unknown_ids_list_the_registry() {
        let err = match build_policy("nope") {
            Err(e) => e.to_string(),
            Ok(_) => panic!("unknown id resolved"),
        };
        assert!(err.contains("exact4"), "{err}");
        assert!(build_policy("stop-first:0").is_err());
        assert!(build_policy("memoryless:x").is_err());
    }
}
