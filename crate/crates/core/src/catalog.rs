//! Catalog entries: one verified polynomial with its provenance, as JSONL or CSV.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::constructions::{Construction, FamilyId};
use crate::field::{FieldCtx, QuadExtension};
use crate::poly::SparsePolynomial;
use crate::verification::PermutationReport;
use crate::wire::{FieldSpec, ParamsJson, PolyJson, ReportJson, SystemJson, WireError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    PaperExample,
    Grid,
    User,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub field: FieldSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilyId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params: Option<ParamsJson>,
    pub poly: PolyJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<PolyJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub system: Option<SystemJson>,
    pub report: ReportJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qm_class: Option<usize>,
    pub provenance: Provenance,
    /// Set for entries kept on purpose although they do not permute.
    #[serde(default)]
    pub negative_control: bool,
}

impl CatalogEntry {
    pub fn from_construction(
        ext: &QuadExtension,
        c: &Construction,
        report: &PermutationReport,
        provenance: Provenance,
    ) -> Self {
        let ctx = ext.big();
        CatalogEntry {
            field: FieldSpec::of(ctx),
            family: Some(c.params.family),
            params: Some(ParamsJson::encode(ctx, &c.params)),
            poly: PolyJson::encode(ctx, &c.poly),
            r: Some(c.r),
            h: Some(PolyJson::encode(ctx, &c.h)),
            system: Some(SystemJson::encode(ctx, &c.system)),
            report: ReportJson::encode(ctx, report),
            qm_class: None,
            provenance,
            negative_control: !report.is_permutation,
        }
    }

    /// An entry for a bare polynomial with no construction behind it.
    pub fn from_polynomial(
        ctx: &FieldCtx,
        f: &SparsePolynomial,
        rh: Option<(u64, &SparsePolynomial)>,
        report: &PermutationReport,
    ) -> Self {
        CatalogEntry {
            field: FieldSpec::of(ctx),
            family: None,
            params: None,
            poly: PolyJson::encode(ctx, f),
            r: rh.map(|(r, _)| r),
            h: rh.map(|(_, h)| PolyJson::encode(ctx, h)),
            system: None,
            report: ReportJson::encode(ctx, report),
            qm_class: None,
            provenance: Provenance::User,
            negative_control: !report.is_permutation,
        }
    }

    /// Entries must permute unless flagged as negative controls.
    pub fn is_consistent(&self) -> bool {
        self.report.is_permutation != self.negative_control
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("entries always serialize")
    }

    pub fn from_json_line(line: &str) -> Result<Self, WireError> {
        Ok(serde_json::from_str(line)?)
    }

    /// "exp:k" pairs meaning coefficient g^k at X^exp; zero coefficients never occur.
    pub fn csv_terms(&self) -> String {
        self.poly
            .terms
            .iter()
            .map(|(e, c)| match c {
                crate::wire::ElementJson::Pow { pow } => format!("{e}:{pow}"),
                crate::wire::ElementJson::Coords { coords } => format!("{e}:{coords:?}"),
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

pub fn write_jsonl<W: Write>(mut w: W, entries: &[CatalogEntry]) -> std::io::Result<()> {
    for e in entries {
        writeln!(w, "{}", e.to_json_line())?;
    }
    Ok(())
}

/// Reads entries, skipping blank lines.
pub fn read_jsonl<R: BufRead>(r: R) -> Result<Vec<CatalogEntry>, WireError> {
    let mut out = Vec::new();
    for line in r.lines() {
        let line = line.map_err(|e| WireError::Invalid(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(CatalogEntry::from_json_line(&line)?);
    }
    Ok(out)
}

pub const CSV_HEADER: &str = "p,q,family,provenance,terms,r,is_permutation,method,qm_class,negative_control";

pub fn write_csv<W: Write>(mut w: W, entries: &[CatalogEntry]) -> std::io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for e in entries {
        let n = (e.field.modulus.len() - 1) as u32;
        let q = (e.field.p as u64).pow(n / 2);
        let family = e.family.map(|f| f.to_string()).unwrap_or_default();
        let prov = serde_json::to_value(e.provenance).expect("serializes");
        let method = serde_json::to_value(e.report.method).expect("serializes");
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{}",
            e.field.p,
            q,
            family,
            prov.as_str().unwrap_or_default(),
            e.csv_terms(),
            e.r.map(|r| r.to_string()).unwrap_or_default(),
            e.report.is_permutation,
            method.as_str().unwrap_or_default(),
            e.qm_class.map(|c| c.to_string()).unwrap_or_default(),
            e.negative_control,
        )?;
    }
    Ok(())
}
