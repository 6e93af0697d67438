use std::collections::BTreeMap;

use hyperschottky::algebra::{curve_discriminant, discriminant_exact, RationalPolynomial};
use hyperschottky::identities::*;
use hyperschottky::igusa::{
    igusa_from_branch_set, igusa_from_branch_set_exact, igusa_from_symmetric, symmetric_from_igusa, symmetric_from_igusa_numeric,
    IgusaClebsch, IgusaError, IgusaInversion, SymmetricCoefficients2,
};
use hyperschottky::num::Precision;
use hyperschottky::periods::{characteristic_dictionary, k_subsets, period_matrix};
use hyperschottky::reconstruct::{genus2_symmetric_from_z, genus3_symmetric_from_z};
use hyperschottky::symcurve::{discriminant_valuations, mu_multiset, symmetric_discriminant, symmetric_discriminant_exact, BranchSet, SymmetricModel};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::{Complex, Rational};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::doc::*;
use crate::{CliError, Mode, Suite};

fn parse<T: for<'a> Deserialize<'a>>(text: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::input(format!("invalid document: {e}")))
}

fn point_json(b: &BranchSet, p: Precision) -> Value {
    Value::Array(
        b.points()
            .iter()
            .map(|pt| match pt.finite() {
                Some(z) => cjson(z, p),
                None => json!("inf"),
            })
            .collect(),
    )
}

pub fn periods(text: &str, p: Precision) -> Result<Value, CliError> {
    let doc: CurveDocument = parse(text)?;
    let b = doc.branch_set(p)?;
    let pd = period_matrix(&b).map_err(CliError::from_period)?;
    let d = characteristic_dictionary(&pd).map_err(CliError::from_period)?;
    let odd: Vec<Value> = d
        .odd_images()
        .into_iter()
        .map(|(s, c)| json!({ "points": s, "characteristic": c.to_string() }))
        .collect();
    Ok(json!({
        "genus": pd.g,
        "digits": p.decimal_digits(),
        "branch_points": point_json(&b, p),
        "omega1": matrix_json(&pd.omega1, p),
        "omega2": matrix_json(&pd.omega2, p),
        "z": matrix_json(&pd.z.to_cmatrix(), p),
        "condition": format!("{:e}", pd.condition),
        "symmetry_defect": format!("{:e}", pd.symmetry_defect),
        "dictionary": {
            "shift": d.shift.to_string(),
            "points": d.points.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            "odd_images": odd,
        },
    }))
}

fn model_json(m: &SymmetricModel, p: Precision) -> Result<Value, CliError> {
    let b = m.branch_set().map_err(CliError::from_sym)?;
    Ok(json!({
        "genus": m.g,
        "coefficients": cvec(&m.coefficients, p),
        "linear": cjson(&m.linear, p),
        "roots": cvec(&m.roots, p),
        "discriminant": cjson(&m.discriminant(), p),
        "mu_multiset": cvec(&mu_multiset(&b), p),
    }))
}

pub fn reconstruct(text: &str, genus: Option<usize>, p: Precision, tol: f64) -> Result<Value, CliError> {
    let v: Value = parse(text)?;
    let v = v.get("z").cloned().unwrap_or(v);
    let doc: MatrixDocument = serde_json::from_value(v).map_err(|e| CliError::input(format!("invalid matrix: {e}")))?;
    if let Some(g) = genus {
        if g != doc.g {
            return Err(CliError::input(format!("--genus {g} but the matrix is {}×{}", doc.g, doc.g)));
        }
    }
    let z = doc.riemann(p)?;
    let eps = p.epsilon();
    match doc.g {
        2 => {
            let r = genus2_symmetric_from_z(&z, eps).map_err(CliError::from_reconstruct)?;
            let mut out = model_json(&r.model, p)?;
            out["theta_discriminant"] = cjson(&r.discriminant, p);
            out["labels"] = json!(r.labels.iter().map(|c| c.to_string()).collect::<Vec<_>>());
            Ok(out)
        }
        3 => {
            let r = genus3_symmetric_from_z(&z, eps, tol).map_err(CliError::from_reconstruct)?;
            let mut out = model_json(&r.model, p)?;
            out["mu_123k"] = cvec(&r.mu, p);
            out["auxiliary_defect"] = json!(format!("{:e}", r.aux_defect));
            Ok(out)
        }
        g => Err(CliError::input(format!("reconstruction is available for genus 2 and 3, not {g}"))),
    }
}

fn igusa_exact_json(t: &IgusaClebsch<Rational>) -> Value {
    let [a, b, c, d] = t.values();
    json!({ "exact": true, "i2": a.to_string(), "i4": b.to_string(), "i6": c.to_string(), "i10": d.to_string() })
}

fn igusa_complex_json(t: &IgusaClebsch<Complex>, p: Precision) -> Value {
    let [a, b, c, d] = t.values();
    json!({ "exact": false, "i2": cjson(a, p), "i4": cjson(b, p), "i6": cjson(c, p), "i10": cjson(d, p) })
}

fn exact_polynomial_of(b: &BranchSet, doc: &CurveDocument) -> Result<Option<RationalPolynomial>, CliError> {
    Ok(match doc.exact_polynomial()? {
        Some(f) => Some(f),
        None => b.polynomial_exact(),
    })
}

pub fn invariants(text: &str, p: Precision) -> Result<Value, CliError> {
    let v: Value = parse(text)?;
    if v.get("coefficients").is_some() || v.get("exact_coefficients").is_some() {
        let doc: ModelDocument = serde_json::from_value(v).map_err(|e| CliError::input(format!("invalid model: {e}")))?;
        return model_invariants(&doc, p);
    }
    let doc: CurveDocument = serde_json::from_value(v).map_err(|e| CliError::input(format!("invalid curve: {e}")))?;
    let b = doc.branch_set(p)?;
    let g = b.genus();
    let mut out = json!({ "genus": g, "branch_points": point_json(&b, p) });
    if let Some(f) = exact_polynomial_of(&b, &doc)? {
        out["polynomial_discriminant"] = json!(discriminant_exact(&f).map_err(CliError::from_algebra)?.to_string());
        out["curve_discriminant"] = json!(curve_discriminant(&f).map_err(CliError::from_algebra)?.to_string());
    }
    let n = b.len();
    let mut sym = Vec::new();
    let vals = if b.exact().is_some() { Some(discriminant_valuations(&b).map_err(CliError::from_sym)?) } else { None };
    for pair in k_subsets(n, 2) {
        let (i, j) = (pair[0], pair[1]);
        let d = symmetric_discriminant(&b, i, j, 1).map_err(CliError::from_sym)?;
        let mut e = json!({
            "pair": [i, j],
            "closed": cjson(&d.closed, p),
            "product": cjson(&d.product, p),
        });
        if b.exact().is_some() {
            e["exact"] = json!(symmetric_discriminant_exact(&b, i, j).map_err(CliError::from_sym)?.to_string());
            if let Some(vals) = &vals {
                if let Some((_, m)) = vals.iter().find(|((a, c), _)| (*a, *c) == (i, j) || (*a, *c) == (j, i)) {
                    let f: BTreeMap<String, i64> = m.iter().map(|(q, k)| (q.to_string(), *k)).collect();
                    e["valuations"] = json!(f);
                }
            }
        }
        sym.push(e);
    }
    out["symmetric_discriminants"] = Value::Array(sym);
    if b.exact().is_some() {
        let primes = hyperschottky::symcurve::bad_reduction_locus_odd(&b).map_err(CliError::from_sym)?;
        out["bad_reduction_odd_primes"] = json!(primes.iter().map(|q| q.to_string()).collect::<Vec<_>>());
    }
    if g == 2 {
        out["igusa_clebsch"] = match igusa_from_branch_set_exact(&b) {
            Ok(t) => igusa_exact_json(&t),
            Err(IgusaError::NotExact) => igusa_complex_json(&igusa_from_branch_set(&b).map_err(CliError::from_igusa)?, p),
            Err(e) => return Err(CliError::from_igusa(e)),
        };
    }
    Ok(out)
}

fn model_invariants(doc: &ModelDocument, p: Precision) -> Result<Value, CliError> {
    let g = doc.genus;
    if g == 0 {
        return Err(CliError::input("genus must be positive"));
    }
    let exact: Option<Vec<Rational>> = match &doc.exact_coefficients {
        Some(c) => Some(c.iter().map(|s| s.rational()).collect::<Result<_, _>>()?),
        None => None,
    };
    let coeffs: Vec<Complex> = match &exact {
        Some(q) => q.iter().map(|x| p.from_rational(x)).collect(),
        None => doc.coefficients.iter().map(|c| c.complex(p)).collect::<Result<_, _>>()?,
    };
    if coeffs.len() != 2 * g - 1 {
        return Err(CliError::input(format!("genus {g} needs {} coefficients, got {}", 2 * g - 1, coeffs.len())));
    }
    let linear = match &doc.linear {
        Some(l) => l.complex(p)?,
        None => p.cone(),
    };
    let m = SymmetricModel::from_coefficients(g, coeffs, linear).map_err(CliError::from_sym)?;
    let mut out = json!({
        "genus": g,
        "roots": cvec(&m.roots, p),
        "symmetric_discriminant": cjson(&m.discriminant(), p),
    });
    if g == 2 {
        out["igusa_clebsch"] = match (&exact, m.sign()) {
            (Some(q), 1) => igusa_exact_json(&igusa_from_symmetric(&SymmetricCoefficients2::new(q[0].clone(), q[1].clone(), q[2].clone()))),
            _ => {
                let c = SymmetricCoefficients2::from_model(&m).map_err(CliError::from_igusa)?;
                igusa_complex_json(&igusa_from_symmetric(&c), p)
            }
        };
    }
    Ok(out)
}

fn candidates_exact(inv: &IgusaInversion<Rational>) -> Vec<Value> {
    inv.candidates
        .iter()
        .map(|c| json!({ "g1": c.g.g1.to_string(), "g2": c.g.g2.to_string(), "g3": c.g.g3.to_string(), "r": c.r.to_string() }))
        .collect()
}

fn candidates_complex(inv: &IgusaInversion<Complex>, p: Precision) -> Vec<Value> {
    inv.candidates
        .iter()
        .map(|c| json!({ "g1": cjson(&c.g.g1, p), "g2": cjson(&c.g.g2, p), "g3": cjson(&c.g.g3, p), "r": cjson(&c.r, p) }))
        .collect()
}

pub fn igusa_invert(text: &str, mode: Mode, p: Precision, tol: f64) -> Result<Value, CliError> {
    let v: Value = parse(text)?;
    let v = v.get("igusa_clebsch").cloned().unwrap_or(v);
    let get = |k: &str| -> Result<CScalar, CliError> {
        let x = v.get(k).ok_or_else(|| CliError::input(format!("missing field {k}")))?;
        serde_json::from_value(x.clone()).map_err(|e| CliError::input(format!("{k}: {e}")))
    };
    let vals = [get("i2")?, get("i4")?, get("i6")?, get("i10")?];
    let rational: Option<Vec<Rational>> = vals
        .iter()
        .map(|c| match c {
            CScalar::Real(s) => s.rational().ok(),
            CScalar::Pair([re, im]) => match im.rational() {
                Ok(z) if z == 0 => re.rational().ok(),
                _ => None,
            },
        })
        .collect();
    let fail = |e: IgusaError| CliError::from_igusa(e);
    let (cands, mode_name, r_roots, defect) = match (mode, rational) {
        (Mode::Exact, Some(q)) => {
            let t = IgusaClebsch::from_array([q[0].clone(), q[1].clone(), q[2].clone(), q[3].clone()]);
            let inv = symmetric_from_igusa(&t, tol).map_err(fail)?;
            (candidates_exact(&inv), "exact", inv.r_roots.len(), inv.transcription_defect)
        }
        (Mode::Exact, None) => return Err(CliError::input("exact mode needs rational invariants; use --mode numeric")),
        (Mode::Numeric, Some(q)) => {
            let t = IgusaClebsch::from_array([q[0].clone(), q[1].clone(), q[2].clone(), q[3].clone()]);
            let inv = symmetric_from_igusa_numeric(&t, p, tol).map_err(fail)?;
            (candidates_complex(&inv, p), "numeric", inv.r_roots.len(), inv.transcription_defect)
        }
        (Mode::Numeric, None) => {
            let c: Vec<Complex> = vals.iter().map(|x| x.complex(p)).collect::<Result<_, _>>()?;
            let t = IgusaClebsch::from_array([c[0].clone(), c[1].clone(), c[2].clone(), c[3].clone()]);
            let inv = symmetric_from_igusa(&t, tol).map_err(fail)?;
            (candidates_complex(&inv, p), "numeric", inv.r_roots.len(), inv.transcription_defect)
        }
    };
    if cands.is_empty() {
        return Err(CliError::new(5, "no candidate survives forward verification"));
    }
    Ok(json!({
        "mode": mode_name,
        "candidates": cands,
        "r_roots": r_roots,
        "transcription_defect": format!("{defect:e}"),
    }))
}

fn test_curve(g: usize, roots: &[i64], inf: bool, p: Precision) -> Result<CurveData, CliError> {
    let b = BranchSet::from_integers(g, roots, inf, p).map_err(CliError::from_sym)?;
    CurveData::new(b).map_err(CliError::from_identity)
}

pub fn verify(suite: Suite, seed: u64, p: Precision, tol: f64) -> Result<(Value, bool), CliError> {
    let want = |s: Suite| suite == Suite::All || suite == s;
    let e = CliError::from_identity;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut reps: Vec<IdentityReport> = Vec::new();

    let need_g2 = want(Suite::Thomae) || want(Suite::Igusa);
    let need_g3 = want(Suite::Thomae) || want(Suite::Igusa) || want(Suite::Frobenius);
    let quintic = if need_g2 { Some(test_curve(2, &[0, 1, 2, 3, 4], true, p)?) } else { None };
    let septic = if need_g3 { Some(test_curve(3, &[0, 1, 2, 3, 4, 5, 6], true, p)?) } else { None };

    if want(Suite::Thomae) {
        let sextic = test_curve(2, &[-3, -1, 0, 1, 2, 4], false, p)?;
        for c in [quintic.as_ref().unwrap(), &sextic] {
            reps.extend(thomae_even_sweep(c, tol).map_err(e)?);
            reps.extend(thomae_jacobian_sweep(c, tol).map_err(e)?);
            reps.extend(thomae_quotient_sweep(c, tol).map_err(e)?);
        }
        let c = septic.as_ref().unwrap();
        for _ in 0..5 {
            let mut pts: Vec<usize> = (1..8).collect();
            pts.shuffle(&mut rng);
            let mut t = vec![0];
            t.extend_from_slice(&pts[..3]);
            reps.push(check_thomae_even(c, &t, tol).map_err(e)?);
            reps.push(check_thomae_jacobian(c, &pts[3..5], tol).map_err(e)?);
            reps.push(check_thomae_quotient(c, &pts[..2], &pts[..4], tol).map_err(e)?);
        }
    }
    if want(Suite::Rosenhain) {
        reps.extend(rosenhain_random_sweep(seed, 20, p, tol).map_err(e)?);
    }
    if want(Suite::Frobenius) {
        reps.extend(frobenius_sweep(septic.as_ref().unwrap(), tol).map_err(e)?);
    }
    if want(Suite::Igusa) {
        reps.push(check_igusa_product(quintic.as_ref().unwrap(), &[0, 1], tol).map_err(e)?);
        reps.push(check_igusa_product(septic.as_ref().unwrap(), &[0, 1, 2], tol).map_err(e)?);
    }
    if want(Suite::Jacobi) {
        let mut taus = vec![p.complex(0.0, 1.0), p.complex(0.5, 2.0)];
        for _ in 0..3 {
            taus.push(p.complex(rng.gen_range(-0.5..0.5), rng.gen_range(0.5..2.0)));
        }
        for tau in &taus {
            reps.push(check_jacobi_g1(tau, p, tol).map_err(e)?.param_seed(seed));
        }
    }
    let ok = reps.iter().all(|r| r.passed);
    let out: Vec<ReportJson> = reps.iter().map(|r| ReportJson::new(r, p)).collect();
    Ok((serde_json::to_value(out).expect("serializable"), ok))
}

trait SeedParam {
    fn param_seed(self, seed: u64) -> Self;
}

impl SeedParam for IdentityReport {
    fn param_seed(mut self, seed: u64) -> Self {
        self.params.insert("seed".into(), seed.to_string());
        self
    }
}
