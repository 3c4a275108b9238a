//! File formats: species files and lattice literals.
//!
//! A species file is JSON of the form
//!
//! ```json
//! {
//!   "N": 2,
//!   "G": [0, 1, 2],
//!   "actions": { "2->1:0,0": [0, 0], "2->2:1,0": [1, 0] }
//! }
//! ```
//!
//! `G[n]` is the size of the degree-`n` carrier (elements are atoms
//! `0..size`). An action key is `m->n:` followed by the surjection as the
//! comma-separated list of images; the value maps carrier indices of degree
//! `m` to carrier indices of degree `n`. Identity permutations are implied
//! and other bijections default to the identity action when omitted; merge
//! actions (`m > n`) must be present whenever both carriers are nonempty.
//!
//! Read as an ordinary species (for `analytic(...)`), only the bijection
//! entries are used. Read as a soft species (for `newton(...)` and
//! `newton --sum`), everything is.
//!
//! A lattice file is `{"elems": 3, "leq": [[true,...],...]}`.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{bail, Context};
use serde::Deserialize;

use fdiff_core::classes::lattice::lattice_from_table;
use fdiff_core::classes::{Lattice, SpeciesSpec};
use fdiff_core::group::{GroupAction, PermGroup};
use fdiff_core::newton::{surjection_vectors, SoftSpecies};
use fdiff_core::{Element, FinSet};

#[derive(Deserialize, Debug)]
pub struct SpeciesFile {
    #[serde(rename = "N")]
    pub degree: usize,
    #[serde(rename = "G")]
    pub sizes: Vec<usize>,
    #[serde(default)]
    pub actions: BTreeMap<String, Vec<usize>>,
}

fn parse_key(key: &str) -> anyhow::Result<(usize, usize, Vec<usize>)> {
    let (arrow, sigma) = key
        .split_once(':')
        .with_context(|| format!("action key `{key}` lacks `:`"))?;
    let (m, n) = arrow
        .split_once("->")
        .with_context(|| format!("action key `{key}` lacks `->`"))?;
    let m: usize = m.trim().parse().context("source degree")?;
    let n: usize = n.trim().parse().context("target degree")?;
    let sigma: Vec<usize> = if sigma.trim().is_empty() {
        Vec::new()
    } else {
        sigma
            .split(',')
            .map(|s| s.trim().parse().context("surjection entry"))
            .collect::<anyhow::Result<_>>()?
    };
    if sigma.len() != m {
        bail!("action key `{key}`: surjection must list {m} images");
    }
    Ok((m, n, sigma))
}

pub fn read_species_file(path: &Path) -> anyhow::Result<SpeciesFile> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    let file: SpeciesFile = serde_json::from_str(&text)
        .with_context(|| format!("parsing {}", path.display()))?;
    if file.sizes.len() != file.degree + 1 {
        bail!("`G` must list {} sizes (degrees 0..=N)", file.degree + 1);
    }
    for key in file.actions.keys() {
        let (m, n, _) = parse_key(key)?;
        if m > file.degree || n > m {
            bail!("action key `{key}` outside the truncation");
        }
    }
    Ok(file)
}

fn lookup(
    file: &SpeciesFile,
    m: usize,
    n: usize,
    sigma: &[usize],
) -> anyhow::Result<Option<Vec<usize>>> {
    let key = format!(
        "{m}->{n}:{}",
        sigma.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
    );
    match file.actions.get(&key) {
        Some(v) => {
            if v.len() != file.sizes[m] || v.iter().any(|&i| i >= file.sizes[n].max(1)) {
                bail!("action `{key}` must map {} indices into 0..{}", file.sizes[m], file.sizes[n]);
            }
            Ok(Some(v.clone()))
        }
        None => Ok(None),
    }
}

/// Loads the file as a soft species over the full surjection truncation.
pub fn load_soft_species(path: &Path) -> anyhow::Result<SoftSpecies> {
    let file = read_species_file(path)?;
    let mut tables: BTreeMap<(usize, usize, Vec<usize>), Vec<usize>> = BTreeMap::new();
    for m in 0..=file.degree {
        for n in 0..=m {
            for sigma in surjection_vectors(m, n) {
                let is_identity = m == n && sigma.iter().enumerate().all(|(i, &v)| i == v);
                let table = match lookup(&file, m, n, &sigma)? {
                    Some(t) => t,
                    None if is_identity => (0..file.sizes[m]).collect(),
                    None if m == n => (0..file.sizes[m]).collect(),
                    None if file.sizes[m] == 0 => Vec::new(),
                    None => bail!(
                        "missing action {m}->{n}:{} (required because G({m}) is nonempty)",
                        sigma.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
                    ),
                };
                tables.insert((m, n, sigma), table);
            }
        }
    }
    let sizes = file.sizes.clone();
    let sets: Vec<FinSet> = sizes.iter().map(|&s| FinSet::atoms(s)).collect();
    SoftSpecies::new(file.degree, sets, move |m, n, sigma, e| {
        let table = &tables[&(m, n, sigma.to_vec())];
        match e {
            Element::Atom(i) => Element::atom(table[*i as usize] as u32),
            _ => unreachable!("species carriers are atoms"),
        }
    })
    .map_err(anyhow::Error::from)
}

/// Loads the file as an ordinary species: degreewise symmetric group
/// actions from the bijection entries only.
pub fn load_species(path: &Path) -> anyhow::Result<SpeciesSpec> {
    let file = read_species_file(path)?;
    let mut coeff = Vec::new();
    for n in 0..=file.degree {
        let sn = PermGroup::symmetric(n)?;
        let mut tables: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
        for sigma in surjection_vectors(n, n) {
            let table = match lookup(&file, n, n, &sigma)? {
                Some(t) => t,
                None => (0..file.sizes[n]).collect(),
            };
            tables.insert(sigma, table);
        }
        let carrier = FinSet::atoms(file.sizes[n]);
        coeff.push(GroupAction::new(sn, carrier, move |g, e| {
            let table = &tables[g];
            match e {
                Element::Atom(i) => Element::atom(table[*i as usize] as u32),
                _ => unreachable!("species carriers are atoms"),
            }
        })?);
    }
    SpeciesSpec::new(coeff).map_err(anyhow::Error::from)
}

#[derive(Deserialize, Debug)]
pub struct LatticeFile {
    pub elems: usize,
    pub leq: Vec<Vec<bool>>,
}

pub fn load_lattice(path: &Path) -> anyhow::Result<Lattice> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    let file: LatticeFile = serde_json::from_str(&text)
        .with_context(|| format!("parsing {}", path.display()))?;
    lattice_from_table(
        &path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default(),
        file.elems,
        file.leq,
    )
    .map_err(anyhow::Error::from)
}
