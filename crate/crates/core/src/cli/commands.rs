//! One function per subcommand, each producing a flat report.

use std::fmt::Write as _;

use crate::boolean::check_axioms;
use crate::cli::document::Loaded;
use crate::error::Result;
use crate::extension::{
    extensions_equivalent, order_preserving_section, validate_cocycle, validate_section,
    DEFAULT_COHOMOLOGY_GUARD,
};
use crate::kernel::{abstract_gram_check, projection_and_isometry, Representation};
use crate::linalg::{max_deviation, CMatrix};
use crate::oracle::{cartan_report, DEFAULT_RECOVERY_GUARD};
use crate::spectral::{
    enumerate_bimodules, enumerate_spectral_sets, msd, mtr, psi_from, section_matrices, theta_from,
    verify_subdiagonal, SpectralSet, DEFAULT_BIMODULE_GUARD,
};

/// An ordered list of `key: value` lines and an overall verdict.
#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub command: &'static str,
    pub fields: Vec<(String, String)>,
    pub passed: bool,
}

impl Report {
    fn new(command: &'static str) -> Self {
        Report {
            command,
            fields: Vec::new(),
            passed: true,
        }
    }

    fn field(&mut self, key: impl Into<String>, value: impl ToString) {
        self.fields.push((key.into(), value.to_string()));
    }

    /// Records a boolean check and folds it into the verdict.
    fn check(&mut self, key: impl Into<String>, ok: bool) {
        self.passed &= ok;
        self.field(key, if ok { "pass" } else { "fail" });
    }

    pub fn text(&self) -> String {
        let mut out = format!("command: {}\n", self.command);
        for (k, v) in &self.fields {
            writeln!(out, "{k}: {v}").unwrap();
        }
        writeln!(out, "result: {}", if self.passed { "pass" } else { "fail" }).unwrap();
        out
    }

    pub fn json(&self) -> String {
        let fields: Vec<[&str; 2]> = self.fields.iter().map(|(k, v)| [k.as_str(), v.as_str()]).collect();
        let value = serde_json::json!({
            "command": self.command,
            "fields": fields,
            "passed": self.passed,
        });
        let mut text = serde_json::to_string_pretty(&value).unwrap();
        text.push('\n');
        text
    }
}

fn names(loaded: &Loaded, set: &SpectralSet) -> String {
    let list: Vec<&str> = set.indices().into_iter().map(|i| loaded.name(i)).collect();
    format!("[{}]", list.join(", "))
}

pub fn validate(loaded: &Loaded) -> Result<Report> {
    let ext = &loaded.extension;
    let monoid = ext.base();
    let mut r = Report::new("validate");
    r.field("atoms", monoid.atoms());
    r.field("k", ext.k());
    r.field("elements", monoid.len());
    let added: Vec<String> = monoid.added().iter().map(|s| s.to_string()).collect();
    r.field("added", if added.is_empty() { "none".to_string() } else { added.join(" ") });
    r.field("extension_order", ext.order());
    let class = monoid.classify()?;
    r.check("inverse_monoid", class.inverse_monoid);
    r.field("idempotents", class.idempotents.len());
    r.field("clifford", class.clifford);
    let axioms = check_axioms(monoid)?;
    if let Some(blocks) = &axioms.rebased {
        let list: Vec<String> = blocks.iter().map(|e| e.to_bijection().to_string()).collect();
        r.field("rebased_on", list.join(" "));
    }
    r.field("boolean_a", &axioms.boolean_a);
    r.field("boolean_b", &axioms.boolean_b);
    r.field("boolean_c", &axioms.boolean_c);
    r.field("locally_complete", &axioms.locally_complete);
    r.field("complete_d", &axioms.complete_d);
    r.field("fundamental", axioms.fundamental);
    r.field("hyperstonean", format!("{} ({})", axioms.hyperstonean, axioms.hyperstonean_note));
    r.check("cartan", axioms.cartan);
    let cocycle = validate_cocycle(monoid, ext.cocycle())?;
    r.check("cocycle", cocycle.passed());
    Ok(r)
}

pub fn section(loaded: &Loaded) -> Result<Report> {
    let ext = &loaded.extension;
    let j = order_preserving_section(ext)?;
    let report = validate_section(ext, &j)?;
    let mut r = Report::new("section");
    for (i, v) in j.values().iter().enumerate() {
        r.field(format!("j({})", loaded.name(i)), v);
    }
    let name = |i: usize| loaded.name(i).to_string();
    r.check("unit", report.unit);
    r.check("order_preserving", report.order_preserving());
    if let Some((s, t)) = report.order_violation {
        r.field("order_witness", format!("{} <= {}", name(s), name(t)));
    }
    r.check("conjugation", report.conjugation());
    if let Some((e, s, f)) = report.conjugation_violation {
        r.field("conjugation_witness", format!("({}, {}, {})", name(e), name(s), name(f)));
    }
    r.check("meets", report.meets());
    if let Some((s, t)) = report.meet_violation {
        r.field("meet_witness", format!("({}, {})", name(s), name(t)));
    }
    r.check("dagger", report.dagger_violation.is_none());
    Ok(r)
}

/// The summary report and the matrix dump of every `λ_π(j(s))`.
pub fn represent(loaded: &Loaded, element_guard: u128, tol: f64, json: bool) -> Result<(Report, String)> {
    let ext = &loaded.extension;
    let j = order_preserving_section(ext)?;
    let rep = Representation::new(ext, &j)?;
    let g = ext.elements(element_guard)?;
    let mats: Vec<CMatrix> = g.iter().map(|v| rep.lambda(v)).collect::<Result<_>>()?;
    let mut hom: f64 = 0.0;
    let mut adj: f64 = 0.0;
    let mut iso: f64 = 0.0;
    for (a, v) in g.iter().enumerate() {
        for (b, w) in g.iter().enumerate() {
            let vw = rep.lambda(&ext.g_multiply(v, w))?;
            hom = hom.max(max_deviation(&(&mats[a] * &mats[b]), &vw));
        }
        adj = adj.max(max_deviation(&mats[a].adjoint(), &rep.lambda(&ext.g_dagger(v))?));
        iso = iso.max(max_deviation(&(&mats[a] * mats[a].adjoint() * &mats[a]), &mats[a]));
    }
    let distinct = (0..mats.len()).all(|a| (0..a).all(|b| max_deviation(&mats[a], &mats[b]) > tol));
    let proj = projection_and_isometry(&rep, &g)?;
    let gram = abstract_gram_check(&rep, &g, tol)?;

    let mut r = Report::new("represent");
    r.field("relation_size", rep.dim());
    r.field("extension_order", g.len());
    r.check("homomorphism", hom <= tol);
    r.check("dagger", adj <= tol);
    r.check("partial_isometries", iso <= tol);
    r.check("injective", distinct);
    r.field("projection_rank", proj.rank);
    r.check("compression", proj.compression_deviation <= tol);
    r.check("isometry", proj.isometry_deviation <= tol);
    r.field("gram_rank", gram.gram_rank);
    r.check("gram_rank_matches", gram.gram_rank == gram.relation_size);
    r.check("intertwining", gram.intertwining_deviation <= tol);
    r.check("reproducing", gram.restriction_violation.is_none());
    r.check("meet_products", gram.meet_violation.is_none());

    let section_mats = section_matrices(&rep)?;
    let dump = if json {
        let list: Vec<serde_json::Value> = section_mats
            .iter()
            .enumerate()
            .map(|(i, m)| {
                let mut entries = Vec::new();
                for row in 0..m.nrows() {
                    for col in 0..m.ncols() {
                        let z = m[(row, col)];
                        if z.norm() > tol {
                            entries.push(serde_json::json!([row, col, z.re, z.im]));
                        }
                    }
                }
                serde_json::json!({ "name": loaded.name(i), "entries": entries })
            })
            .collect();
        let value = serde_json::json!({
            "atoms": ext.base().atoms(),
            "k": ext.k(),
            "dim": rep.dim(),
            "matrices": list,
        });
        let mut text = serde_json::to_string_pretty(&value).unwrap();
        text.push('\n');
        text
    } else {
        let mut text = String::new();
        for (i, m) in section_mats.iter().enumerate() {
            writeln!(text, "# j({})", loaded.name(i)).unwrap();
            text.push_str(&rep.dump(m, tol));
        }
        text
    };
    Ok((r, dump))
}

pub fn oracle(loaded: &Loaded, element_guard: u128, tol: f64) -> Result<Report> {
    let c = cartan_report(&loaded.extension, element_guard, DEFAULT_RECOVERY_GUARD, tol)?;
    let mut r = Report::new("oracle");
    r.field("atoms", c.atoms);
    r.field("relation_size", c.relation_size);
    r.field("dim_m", c.m.dim());
    r.field("dim_d", c.d.dim());
    if let Some(dc) = c.double_commutant_dim {
        r.field("dim_double_commutant", dc);
    }
    r.check("dimensions", c.dims_match());
    r.check("m_is_algebra", c.m.is_algebra());
    r.check("d_is_algebra", c.d.is_algebra());
    r.field("relative_commutant_dim", c.masa.relative_commutant_dim);
    r.field("center_dim", c.masa.center_dim);
    r.check("masa", c.masa.masa());
    r.check("expectation_matches_delta", c.expectation.delta_deviation <= tol);
    r.check("expectation_idempotent", c.expectation.idempotent_deviation <= tol);
    r.check("expectation_unital", c.expectation.unital_deviation <= tol);
    r.check("expectation_positive", c.expectation.positivity_min >= -tol);
    r.check("expectation_faithful", c.expectation.faithful());
    r.check("normalizes", c.normalizes);
    r.field("recovered_elements", c.recovery.monoid.len());
    r.field("recovery_candidates", c.recovery.candidates);
    r.check("recovered_isomorphic", c.recovery.isomorphism.is_some());
    if let Some(perm) = &c.recovery.isomorphism {
        r.field("recovery_atom_map", format!("{perm:?}"));
    }
    Ok(r)
}

pub fn spectral(loaded: &Loaded, guard: usize, tol: f64) -> Result<Report> {
    let ext = &loaded.extension;
    let j = order_preserving_section(ext)?;
    let rep = Representation::new(ext, &j)?;
    let mats = section_matrices(&rep)?;
    let sets = enumerate_spectral_sets(ext.base(), guard)?;
    let mut r = Report::new("spectral");
    r.field("spectral_sets", sets.len());
    let mut round_trip = true;
    for a in &sets {
        let b = psi_from(&mats, a, tol);
        round_trip &= theta_from(&rep, &mats, &b, tol)? == *a;
    }
    r.check("theta_psi_identity", round_trip);
    let m = psi_from(&mats, &SpectralSet::full(ext.base().len()), tol);
    match enumerate_bimodules(&rep, &m, DEFAULT_BIMODULE_GUARD, tol) {
        Ok(bimodules) => {
            r.field("bimodules", bimodules.len());
            r.check("counts_agree", bimodules.len() == sets.len());
            let mut ok = true;
            for b in &bimodules {
                let a = theta_from(&rep, &mats, b, tol)?;
                ok &= psi_from(&mats, &a, tol).same_as(b, tol);
            }
            r.check("psi_theta_identity", ok);
        }
        Err(e) => r.field("bimodules", format!("skipped ({e})")),
    }
    r.field("closure_note", "finite dimension: weak-*, Bures and norm closures of subspaces coincide");
    Ok(r)
}

fn subdiagonal(loaded: &Loaded, command: &'static str, triangular: bool, guard: usize, tol: f64) -> Result<Report> {
    let ext = &loaded.extension;
    let monoid = ext.base();
    let members = if triangular { mtr(monoid, guard)? } else { msd(monoid, guard)? };
    let j = order_preserving_section(ext)?;
    let rep = Representation::new(ext, &j)?;
    let m = psi_from(&section_matrices(&rep)?, &SpectralSet::full(monoid.len()), tol);
    let mut r = Report::new(command);
    r.field("count", members.len());
    for (i, a) in members.iter().enumerate() {
        let v = verify_subdiagonal(&rep, &m, a, guard, tol)?;
        r.field(format!("member[{i}]"), names(loaded, a));
        r.field(format!("member[{i}].dims"), format!("A={} N={}", v.algebra_dim, v.diagonal_dim));
        r.check(format!("member[{i}].subdiagonal"), v.passed(tol));
    }
    Ok(r)
}

pub fn msd_report(loaded: &Loaded, guard: usize, tol: f64) -> Result<Report> {
    subdiagonal(loaded, "msd", false, guard, tol)
}

pub fn mtr_report(loaded: &Loaded, guard: usize, tol: f64) -> Result<Report> {
    subdiagonal(loaded, "mtr", true, guard, tol)
}

pub fn equiv(a: &Loaded, b: &Loaded, size_guard: usize) -> Result<Report> {
    let mut r = Report::new("equiv");
    match extensions_equivalent(&a.extension, &b.extension, size_guard, DEFAULT_COHOMOLOGY_GUARD)? {
        Some(w) => {
            r.check("equivalent", true);
            r.field("atom_map", format!("{:?}", w.atom_map));
            for (i, &t) in w.theta.iter().enumerate() {
                r.field(format!("theta({})", a.name(i)), b.name(t));
            }
        }
        None => r.check("equivalent", false),
    }
    Ok(r)
}
