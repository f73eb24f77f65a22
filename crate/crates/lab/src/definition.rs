//! Triad and matrix definition files, PDE files and perturbations.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use pss_core::forms::{sasaki_triad, triad_to_matrix, Mat2, MatrixOneForm, OneForm, Triad};
use pss_core::pss::{catalog_entry, CatalogEntry, EntryData, Pde, CATALOG_NAMES};
use pss_core::symcore::{parse, Expr, GaussRational, PARAM_NAMES};
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormFile {
    pub dx: String,
    pub dt: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TriadFile {
    pub name: String,
    pub parameters: Vec<String>,
    pub w1: FormFile,
    pub w2: FormFile,
    pub w3: FormFile,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parameters: Option<Vec<String>>,
    #[serde(rename = "X")]
    pub x: [[String; 2]; 2],
    #[serde(rename = "T")]
    pub t: [[String; 2]; 2],
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DefinitionFile {
    Triad(TriadFile),
    Matrix(MatrixFile),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Body {
    Triad(Triad),
    Matrix(MatrixOneForm),
}

/// A parsed triad or matrix one-form with its name.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Definition {
    pub name: String,
    pub parameters: Vec<String>,
    pub body: Body,
}

fn expr(s: &str, at: &str) -> Result<Expr> {
    parse(s).map_err(|e| LabError::invalid(format!("{at}: {e}")))
}

fn mat(m: &[[String; 2]; 2], at: &str) -> Result<Mat2> {
    let e = |i: usize, j: usize| expr(&m[i][j], &format!("{at}[{i}][{j}]"));
    Ok([[e(0, 0)?, e(0, 1)?], [e(1, 0)?, e(1, 1)?]])
}

fn mat_strings(m: &Mat2) -> [[String; 2]; 2] {
    m.clone().map(|row| row.map(|e| e.to_string()))
}

fn form_file(w: &OneForm) -> FormFile {
    FormFile { dx: w.fx.to_string(), dt: w.ft.to_string() }
}

impl Definition {
    pub fn from_file_contents(text: &str, origin: &Path) -> Result<Definition> {
        let file: DefinitionFile =
            serde_json::from_str(text).map_err(|source| LabError::Json { path: origin.into(), source })?;
        let def = match file {
            DefinitionFile::Triad(f) => {
                let one = |w: &FormFile, k: &str| -> Result<OneForm> {
                    Ok(OneForm::new(expr(&w.dx, &format!("{k}.dx"))?, expr(&w.dt, &format!("{k}.dt"))?))
                };
                let tr = Triad::new(one(&f.w1, "w1")?, one(&f.w2, "w2")?, one(&f.w3, "w3")?);
                Definition { name: f.name, parameters: f.parameters, body: Body::Triad(tr) }
            }
            DefinitionFile::Matrix(f) => {
                let om = MatrixOneForm::new(mat(&f.x, "X")?, mat(&f.t, "T")?);
                let name = f.name.unwrap_or_else(|| {
                    origin.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
                });
                let declared = f.parameters.is_some();
                let mut d = Definition { name, parameters: f.parameters.unwrap_or_default(), body: Body::Matrix(om) };
                if !declared {
                    d.parameters = d.used_parameters().into_iter().collect();
                }
                d
            }
        };
        def.check_parameters()?;
        Ok(def)
    }

    pub fn load(path: &Path) -> Result<Definition> {
        let text = fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
        Definition::from_file_contents(&text, path)
    }

    pub fn from_catalog(e: &CatalogEntry) -> Definition {
        let body = match &e.data {
            EntryData::Triad(t) => Body::Triad(t.clone()),
            EntryData::Akns(_) => Body::Matrix(e.matrix()),
        };
        Definition { name: e.name.clone(), parameters: e.parameters(), body }
    }

    fn leaves(&self) -> Vec<&Expr> {
        match &self.body {
            Body::Triad(t) => t.forms().into_iter().flat_map(|w| [&w.fx, &w.ft]).collect(),
            Body::Matrix(m) => m.x.iter().chain(&m.t).flatten().collect(),
        }
    }

    pub fn used_parameters(&self) -> BTreeSet<String> {
        self.leaves().into_iter().flat_map(|e| e.params()).map(|p| p.name().to_string()).collect()
    }

    fn check_parameters(&self) -> Result<()> {
        for p in &self.parameters {
            if !PARAM_NAMES.contains(&p.as_str()) {
                return Err(LabError::invalid(format!("unknown parameter `{p}`")));
            }
        }
        let declared: BTreeSet<&str> = self.parameters.iter().map(String::as_str).collect();
        if let Some(p) = self.used_parameters().iter().find(|p| !declared.contains(p.as_str())) {
            return Err(LabError::invalid(format!("parameter `{p}` is used but not declared")));
        }
        Ok(())
    }

    pub fn triad(&self) -> Result<Triad> {
        match &self.body {
            Body::Triad(t) => Ok(t.clone()),
            Body::Matrix(m) => Ok(sasaki_triad(m)?),
        }
    }

    pub fn matrix(&self) -> MatrixOneForm {
        match &self.body {
            Body::Triad(t) => triad_to_matrix(t),
            Body::Matrix(m) => m.clone(),
        }
    }

    pub fn to_file(&self) -> DefinitionFile {
        match &self.body {
            Body::Triad(t) => DefinitionFile::Triad(TriadFile {
                name: self.name.clone(),
                parameters: self.parameters.clone(),
                w1: form_file(&t.w1),
                w2: form_file(&t.w2),
                w3: form_file(&t.w3),
            }),
            Body::Matrix(m) => DefinitionFile::Matrix(MatrixFile {
                name: Some(self.name.clone()),
                parameters: Some(self.parameters.clone()),
                x: mat_strings(&m.x),
                t: mat_strings(&m.t),
            }),
        }
    }

    /// Applies `p` to the triad; matrix definitions pass through the Sasaki map.
    pub fn perturbed(&self, p: &Perturbation) -> Result<Definition> {
        let mut tr = self.triad()?;
        let w = match p.form {
            1 => &mut tr.w1,
            2 => &mut tr.w2,
            _ => &mut tr.w3,
        };
        let k = Expr::Const(p.factor.clone());
        if p.component != Some(Component::Dt) {
            w.fx = &k * &w.fx;
        }
        if p.component != Some(Component::Dx) {
            w.ft = &k * &w.ft;
        }
        Ok(Definition { name: format!("{}+{}", self.name, p.label), parameters: self.parameters.clone(), body: Body::Triad(tr) })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Component {
    Dx,
    Dt,
}

/// `wK*R` scales both coefficients of `ω_K` by `R`; `wK.dx*R` and
/// `wK.dt*R` scale one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Perturbation {
    pub label: String,
    pub form: u8,
    pub component: Option<Component>,
    pub factor: GaussRational,
}

impl Perturbation {
    pub fn parse(s: &str) -> Result<Perturbation> {
        let bad = || LabError::invalid(format!("bad perturbation `{s}`; expected wK*R or wK.dx*R"));
        let (target, factor) = s.split_once('*').ok_or_else(bad)?;
        let (form, component) = match target.split_once('.') {
            Some((f, "dx")) => (f, Some(Component::Dx)),
            Some((f, "dt")) => (f, Some(Component::Dt)),
            Some(_) => return Err(bad()),
            None => (target, None),
        };
        let form = match form {
            "w1" => 1,
            "w2" => 2,
            "w3" => 3,
            _ => return Err(bad()),
        };
        let factor = parse(factor).ok().and_then(|e| e.as_const().cloned()).ok_or_else(bad)?;
        Ok(Perturbation { label: s.to_string(), form, component, factor })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolvedFile {
    pub jet: String,
    pub rhs: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PdeFile {
    pub name: String,
    pub equation: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solved: Option<SolvedFile>,
}

impl PdeFile {
    pub fn from_pde(p: &Pde) -> PdeFile {
        PdeFile {
            name: p.name.clone(),
            equation: p.e.to_string(),
            solved: p.solved.as_ref().map(|(z, g)| SolvedFile {
                jet: Expr::Jet(*z).to_string(),
                rhs: g.to_string(),
            }),
        }
    }

    pub fn to_pde(&self) -> Result<Pde> {
        let e = expr(&self.equation, "equation")?;
        let solved = match &self.solved {
            None => None,
            Some(s) => match expr(&s.jet, "solved.jet")? {
                Expr::Jet(z) => Some((z, expr(&s.rhs, "solved.rhs")?)),
                _ => return Err(LabError::invalid("solved.jet must be a jet coordinate such as u_xt")),
            },
        };
        let pde = Pde::new(&self.name, e, solved);
        if !pde.solved_is_consistent()? {
            return Err(LabError::invalid("solved form does not annihilate the equation"));
        }
        Ok(pde)
    }
}

/// `sg`, `ch`, their long names, or a PDE file.
pub fn resolve_pde(spec: &str) -> Result<Pde> {
    match spec {
        "sg" | "sine-gordon" => Ok(Pde::sine_gordon()),
        "ch" | "camassa-holm" => Ok(Pde::camassa_holm()),
        path => {
            let p = Path::new(path);
            if !p.exists() {
                return Err(LabError::invalid(format!("unknown PDE `{spec}`; use sg, ch or a file")));
            }
            let text = fs::read_to_string(p).map_err(|e| LabError::io(p, e))?;
            let f: PdeFile = serde_json::from_str(&text).map_err(|source| LabError::Json { path: p.into(), source })?;
            f.to_pde()
        }
    }
}

pub fn resolve_catalog(name: &str) -> Result<CatalogEntry> {
    catalog_entry(name).ok_or_else(|| {
        LabError::invalid(format!("unknown catalog entry `{name}`; known: {}", CATALOG_NAMES.join(", ")))
    })
}
