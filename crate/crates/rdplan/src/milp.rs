//! A minimal mixed-integer linear program container: named variables with
//! bounds, single-sense linear constraints, and a minimize objective.
//! Solver-facing text formats live in `solver`; model assembly in `planner`.

use crate::error::{Error, Result};
use std::collections::HashMap;

/// Maximum variable/constraint name length accepted by the model writer.
pub const MAX_NAME_LEN: usize = 255;

/// Variable domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    Continuous,
    Binary,
}

/// Constraint sense.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

/// Index of a variable within its model.
pub type VarId = usize;

/// One decision variable with bounds and objective coefficient.
#[derive(Debug, Clone)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
    pub lower: f64,
    pub upper: f64,
    pub obj: f64,
}

/// One linear constraint: Σ coeff·var  sense  rhs.
#[derive(Debug, Clone)]
pub struct Constraint {
    pub name: String,
    pub terms: Vec<(VarId, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

/// Index sets the model was built over, for solution extraction and reports.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ModelMeta {
    pub bus_ids: Vec<usize>,
    pub n_generators: usize,
    pub n_existing_lines: usize,
    pub n_candidate_lines: usize,
    pub storage_buses: Vec<usize>,
    pub wind_buses: Vec<usize>,
    pub n_rd: usize,
    pub n_sld: usize,
    pub hours: usize,
}

/// A minimize-sense mixed-integer linear program.
#[derive(Debug, Clone, Default)]
pub struct MilpModel {
    pub variables: Vec<Variable>,
    pub constraints: Vec<Constraint>,
    pub meta: ModelMeta,
    name_index: HashMap<String, VarId>,
}

impl MilpModel {
    pub fn new(meta: ModelMeta) -> Self {
        MilpModel {
            variables: Vec::new(),
            constraints: Vec::new(),
            meta,
            name_index: HashMap::new(),
        }
    }

    /// Declare a variable; names must be unique (a duplicate is a builder bug).
    pub fn add_var(&mut self, name: String, kind: VarKind, lower: f64, upper: f64, obj: f64) -> VarId {
        let id = self.variables.len();
        let prev = self.name_index.insert(name.clone(), id);
        assert!(prev.is_none(), "duplicate variable name {name}");
        self.variables.push(Variable {
            name,
            kind,
            lower,
            upper,
            obj,
        });
        id
    }

    /// Add a constraint; empty rows are dropped silently.
    pub fn add_con(&mut self, name: String, terms: Vec<(VarId, f64)>, sense: Sense, rhs: f64) {
        self.constraints.push(Constraint {
            name,
            terms,
            sense,
            rhs,
        });
    }

    pub fn var_id(&self, name: &str) -> Option<VarId> {
        self.name_index.get(name).copied()
    }

    pub fn var(&self, name: &str) -> Option<&Variable> {
        self.var_id(name).map(|id| &self.variables[id])
    }

    pub fn n_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn n_binaries(&self) -> usize {
        self.variables.iter().filter(|v| v.kind == VarKind::Binary).count()
    }

    /// Objective value of an assignment in variable order.
    pub fn objective_value(&self, values: &[f64]) -> f64 {
        self.variables
            .iter()
            .zip(values)
            .map(|(v, x)| v.obj * x)
            .sum()
    }

    /// Left-hand-side value of a constraint under an assignment.
    pub fn lhs_value(&self, con: &Constraint, values: &[f64]) -> f64 {
        con.terms.iter().map(|&(id, c)| c * values[id]).sum()
    }

    /// Largest constraint violation under an assignment (0 when feasible).
    pub fn max_violation(&self, values: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for con in &self.constraints {
            let lhs = self.lhs_value(con, values);
            let v = match con.sense {
                Sense::Le => lhs - con.rhs,
                Sense::Ge => con.rhs - lhs,
                Sense::Eq => (lhs - con.rhs).abs(),
            };
            worst = worst.max(v);
        }
        for (v, &x) in self.variables.iter().zip(values) {
            worst = worst.max(v.lower - x).max(x - v.upper);
        }
        worst
    }

    /// Structural invariants: unique names within bounds, references resolve,
    /// binaries bounded by {0,1}.
    pub fn check(&self) -> Result<()> {
        let mut seen = HashMap::new();
        for (i, v) in self.variables.iter().enumerate() {
            if v.name.len() > MAX_NAME_LEN {
                return Err(Error::NameTooLong(v.name.clone()));
            }
            if let Some(_prev) = seen.insert(&v.name, i) {
                return Err(Error::Schema(format!("duplicate variable {}", v.name)));
            }
            if v.kind == VarKind::Binary && (v.lower < 0.0 || v.upper > 1.0) {
                return Err(Error::Schema(format!(
                    "binary {} has bounds [{}, {}]",
                    v.name, v.lower, v.upper
                )));
            }
            if v.lower > v.upper {
                return Err(Error::Schema(format!(
                    "variable {} has crossed bounds [{}, {}]",
                    v.name, v.lower, v.upper
                )));
            }
        }
        let mut cons = HashMap::new();
        for (i, c) in self.constraints.iter().enumerate() {
            if c.name.len() > MAX_NAME_LEN {
                return Err(Error::NameTooLong(c.name.clone()));
            }
            if let Some(_prev) = cons.insert(&c.name, i) {
                return Err(Error::Schema(format!("duplicate constraint {}", c.name)));
            }
            for &(id, coeff) in &c.terms {
                if id >= self.variables.len() {
                    return Err(Error::Schema(format!(
                        "constraint {} references variable #{id} of {}",
                        c.name,
                        self.variables.len()
                    )));
                }
                if !coeff.is_finite() {
                    return Err(Error::Schema(format!(
                        "constraint {} has non-finite coefficient on {}",
                        c.name, self.variables[id].name
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Canonical variable and constraint names. Index widths: buses, generators,
/// lines and segments use two digits; days and blocks three; hours two.
pub mod names {
    pub fn y_line(l: usize) -> String {
        format!("Y_L{l:02}")
    }
    pub fn c_storage(bus: usize) -> String {
        format!("C_S{bus:02}")
    }
    pub fn s_storage(bus: usize) -> String {
        format!("S_S{bus:02}")
    }
    pub fn pw_wind(bus: usize) -> String {
        format!("PW_W{bus:02}")
    }
    pub fn p_gen(g: usize, rd: usize, h: usize) -> String {
        format!("P_G{g:02}_D{rd:03}_H{h:02}")
    }
    pub fn ps_seg(g: usize, rd: usize, h: usize, k: usize) -> String {
        format!("PS_G{g:02}_D{rd:03}_H{h:02}_K{k:02}")
    }
    pub fn r_gen(g: usize, rd: usize, h: usize) -> String {
        format!("R_G{g:02}_D{rd:03}_H{h:02}")
    }
    pub fn i_gen(g: usize, rd: usize, h: usize) -> String {
        format!("I_G{g:02}_D{rd:03}_H{h:02}")
    }
    pub fn pc_wind(bus: usize, rd: usize, h: usize) -> String {
        format!("PC_W{bus:02}_D{rd:03}_H{h:02}")
    }
    pub fn pch(bus: usize, rd: usize, h: usize) -> String {
        format!("PCH_S{bus:02}_D{rd:03}_H{h:02}")
    }
    pub fn pdh(bus: usize, rd: usize, h: usize) -> String {
        format!("PDH_S{bus:02}_D{rd:03}_H{h:02}")
    }
    pub fn u_storage(bus: usize, rd: usize, h: usize) -> String {
        format!("U_S{bus:02}_D{rd:03}_H{h:02}")
    }
    pub fn lam(bus: usize, rd: usize, h: usize) -> String {
        format!("LAM_S{bus:02}_D{rd:03}_H{h:02}")
    }
    pub fn lamz(bus: usize, rd: usize) -> String {
        format!("LAMZ_S{bus:02}_D{rd:03}")
    }
    pub fn dlam(bus: usize, rd: usize) -> String {
        format!("DLAM_S{bus:02}_D{rd:03}")
    }
    pub fn e_sld(bus: usize, sld: usize) -> String {
        format!("E_S{bus:02}_B{sld:03}")
    }
    pub fn lmin(bus: usize, rd: usize) -> String {
        format!("LMIN_S{bus:02}_D{rd:03}")
    }
    pub fn lmax(bus: usize, rd: usize) -> String {
        format!("LMAX_S{bus:02}_D{rd:03}")
    }
    pub fn theta(bus: usize, rd: usize, h: usize) -> String {
        format!("TH_B{bus:02}_D{rd:03}_H{h:02}")
    }
    pub fn pe_line(l: usize, rd: usize, h: usize) -> String {
        format!("PE_L{l:02}_D{rd:03}_H{h:02}")
    }
    pub fn pl_line(l: usize, rd: usize, h: usize) -> String {
        format!("PL_L{l:02}_D{rd:03}_H{h:02}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_name_padding() {
        assert_eq!(names::y_line(1), "Y_L01");
        assert_eq!(names::c_storage(3), "C_S03");
        assert_eq!(names::p_gen(1, 14, 24), "P_G01_D014_H24");
        assert_eq!(names::ps_seg(2, 1, 1, 3), "PS_G02_D001_H01_K03");
        assert_eq!(names::e_sld(7, 288), "E_S07_B288");
        assert_eq!(names::lam(5, 365, 1), "LAM_S05_D365_H01");
        assert_eq!(names::theta(10, 2, 13), "TH_B10_D002_H13");
    }

    #[test]
    fn objective_and_violation_evaluation() {
        let mut m = MilpModel::new(ModelMeta::default());
        let x = m.add_var("X".into(), VarKind::Continuous, 0.0, 10.0, 2.0);
        let y = m.add_var("Y".into(), VarKind::Binary, 0.0, 1.0, 5.0);
        m.add_con("C1".into(), vec![(x, 1.0), (y, 3.0)], Sense::Le, 6.0);
        assert_eq!(m.objective_value(&[2.0, 1.0]), 9.0);
        assert_eq!(m.max_violation(&[2.0, 1.0]), 0.0);
        assert_eq!(m.max_violation(&[4.0, 1.0]), 1.0);
        assert!(m.check().is_ok());
    }

    #[test]
    fn check_rejects_bad_binary_bounds() {
        let mut m = MilpModel::new(ModelMeta::default());
        m.add_var("B".into(), VarKind::Binary, 0.0, 2.0, 0.0);
        assert!(m.check().is_err());
    }

    #[test]
    fn check_rejects_long_names() {
        let mut m = MilpModel::new(ModelMeta::default());
        m.add_var("N".repeat(256), VarKind::Continuous, 0.0, 1.0, 0.0);
        assert!(matches!(m.check(), Err(Error::NameTooLong(_))));
    }

    #[test]
    #[should_panic(expected = "duplicate variable name")]
    fn duplicate_names_panic_in_builder() {
        let mut m = MilpModel::new(ModelMeta::default());
        m.add_var("X".into(), VarKind::Continuous, 0.0, 1.0, 0.0);
        m.add_var("X".into(), VarKind::Continuous, 0.0, 1.0, 0.0);
    }
}
