use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::Pde;
use crate::forms::{sasaki_triad, AknsData, FormsError, MatrixOneForm, OneForm, Triad};
use crate::symcore::{parse, Expr};

pub const CATALOG_NAMES: [&str; 5] = ["sg", "ch", "sg-akns", "sg-akns-printed", "ch-akns"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    SineGordonTriad,
    CamassaHolmTriad,
    SineGordonAkns,
    CamassaHolmAkns,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EntryData {
    Triad(Triad),
    Akns(AknsData),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CatalogEntry {
    pub name: String,
    pub family: Family,
    pub data: EntryData,
    pub pde: Pde,
    /// Expressions the parameters are required to annihilate.
    pub constraints: Vec<Expr>,
    pub notes: String,
}

impl CatalogEntry {
    /// The triad itself, or the Sasaki triad of the AKNS matrix.
    pub fn triad(&self) -> Result<Triad, FormsError> {
        match &self.data {
            EntryData::Triad(t) => Ok(t.clone()),
            EntryData::Akns(d) => sasaki_triad(&MatrixOneForm::akns(d)),
        }
    }

    pub fn matrix(&self) -> MatrixOneForm {
        match &self.data {
            EntryData::Triad(t) => crate::forms::triad_to_matrix(t),
            EntryData::Akns(d) => MatrixOneForm::akns(d),
        }
    }

    pub fn parameters(&self) -> Vec<String> {
        let mut ps = alloc::collections::BTreeSet::new();
        let mut add = |e: &Expr| ps.extend(e.params().into_iter().map(|p| p.name().to_string()));
        match &self.data {
            EntryData::Triad(t) => t.forms().iter().for_each(|w| {
                add(&w.fx);
                add(&w.ft)
            }),
            EntryData::Akns(d) => [&d.q, &d.r, &d.a, &d.b, &d.c, &d.zeta].into_iter().for_each(add),
        }
        ps.into_iter().collect()
    }
}

fn p(s: &str) -> Expr {
    parse(s).expect("catalog expression parses")
}

/// Parses `s` with `M` standing for `m = u − u_xx`.
fn with_m(s: &str) -> Expr {
    p(&s.replace('M', "(u - u_xx)"))
}

fn sg_triad() -> CatalogEntry {
    CatalogEntry {
        name: "sg".into(),
        family: Family::SineGordonTriad,
        data: EntryData::Triad(Triad::new(
            OneForm::new(Expr::zero(), p("sin(u)/eta")),
            OneForm::new(p("eta"), p("cos(u)/eta")),
            OneForm::new(p("u_x"), Expr::zero()),
        )),
        pde: Pde::sine_gordon(),
        constraints: Vec::new(),
        notes: "sine-Gordon triad with parameter eta".into(),
    }
}

fn ch_triad() -> CatalogEntry {
    CatalogEntry {
        name: "ch".into(),
        family: Family::CamassaHolmTriad,
        data: EntryData::Triad(Triad::new(
            OneForm::new(
                with_m("lambda/2 + 1/(2*lambda) - M"),
                with_m("u*M + lambda*u/2 - u/(2*lambda) - 1/2 - lambda^2/2"),
            ),
            OneForm::new(Expr::zero(), p("-u_x")),
            OneForm::new(
                with_m("M + 1/(2*lambda) - lambda/2"),
                with_m("lambda^2/2 - 1/2 - u/(2*lambda) - lambda*u/2 - u*M"),
            ),
        )),
        pde: Pde::camassa_holm(),
        constraints: Vec::new(),
        notes: "Camassa-Holm triad with m = u - u_xx and nonzero parameter lambda".into(),
    }
}

fn sg_akns(printed: bool) -> CatalogEntry {
    let (name, a, notes) = if printed {
        (
            "sg-akns-printed",
            "i*cos(u)/4",
            "sine-Gordon AKNS data as printed, A = i cos(u)/4; all three compatibility residuals keep a factor 1 - zeta and do not reduce",
        )
    } else {
        (
            "sg-akns",
            "i*cos(u)/(4*zeta)",
            "sine-Gordon AKNS data with A = i cos(u)/(4 zeta), the value the compatibility system requires",
        )
    };
    CatalogEntry {
        name: name.into(),
        family: Family::SineGordonAkns,
        data: EntryData::Akns(AknsData {
            q: p("-u_x/2"),
            r: p("u_x/2"),
            a: p(a),
            b: p("i*sin(u)/(4*zeta)"),
            c: p("i*sin(u)/(4*zeta)"),
            zeta: p("zeta"),
        }),
        pde: Pde::sine_gordon(),
        constraints: Vec::new(),
        notes: notes.into(),
    }
}

fn ch_akns() -> CatalogEntry {
    CatalogEntry {
        name: "ch-akns".into(),
        family: Family::CamassaHolmAkns,
        data: EntryData::Akns(AknsData {
            q: p("((beta - 1)/eta^2 - 1 - beta)/2"),
            r: with_m("(1 - 2*M - beta + (beta + 1)/eta^2)/2"),
            a: p("(u_x - eta*u - beta/eta)/2"),
            b: p("(beta*u - 1 + beta*u/eta^2 + u + u/eta^2)/2"),
            c: with_m("(2/eta^2 - 2*u*M + beta*u + beta*u/eta^2 - u - 2*beta*u_x/eta + 2*u_x/eta - u - (2*beta + u)/eta^2)/2",
            ),
            zeta: p("i*eta/2"),
        }),
        pde: Pde::camassa_holm(),
        constraints: alloc::vec![p("eta^4 - eta^2 + beta^2*eta^2 - (beta^2 + 1 - 2*beta)")],
        notes: "Camassa-Holm AKNS data as printed, with eta = -2 i zeta; under investigation, residuals reported verbatim"
            .into(),
    }
}

pub fn catalog() -> Vec<CatalogEntry> {
    alloc::vec![sg_triad(), ch_triad(), sg_akns(false), sg_akns(true), ch_akns()]
}

pub fn catalog_entry(name: &str) -> Option<CatalogEntry> {
    catalog().into_iter().find(|e| e.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pss::{verify_pss, Status, VerifyMode};
    use crate::symcore::{eval_numeric, Assignment, Param, Symbol, DEFAULT_SEED};
    use num_complex::Complex64;

    #[test]
    fn names_and_families() {
        let c = catalog();
        let names: Vec<&str> = c.iter().map(|e| e.name.as_str()).collect();
        assert_eq!(names, CATALOG_NAMES);
        let fams: alloc::collections::BTreeSet<Family> = c.iter().map(|e| e.family).collect();
        assert_eq!(fams.len(), 4);
        assert_eq!(catalog_entry("ch").unwrap().parameters(), ["lambda"]);
        assert_eq!(catalog_entry("ch-akns").unwrap().parameters(), ["beta", "eta"]);
    }

    #[test]
    fn verification_status() {
        for e in catalog() {
            let rep = verify_pss(&e.triad().unwrap(), &e.pde, VerifyMode::Auto, DEFAULT_SEED).unwrap();
            let expect = match e.name.as_str() {
                "sg-akns-printed" | "ch-akns" => Status::Failed,
                _ => Status::PssVerified,
            };
            assert_eq!(rep.status, expect, "{}", e.name);
        }
    }

    #[test]
    fn constraint_values() {
        let k = &catalog_entry("ch-akns").unwrap().constraints[0];
        let at = |eta: f64, beta: f64| {
            let mut a = Assignment::new();
            a.insert(Symbol::Param(Param::new("eta")), Complex64::new(eta, 0.0));
            a.insert(Symbol::Param(Param::new("beta")), Complex64::new(beta, 0.0));
            eval_numeric(k, &a).unwrap()
        };
        assert_eq!(at(1.0, 1.0), Complex64::new(1.0, 0.0));
        let eta = ((1.0 + 5f64.sqrt()) / 2.0).sqrt();
        assert!(at(eta, 0.0).norm() < 1e-12);
    }
}
