//! End-to-end analysis: subspace in, structured report out.
//!
//! `analyze` chains the normalizer search, the induced action, the
//! reflection census, the smoothness verdict, the Coxeter
//! classification, the doubled-module certificate, and (for affine
//! inputs) the translation filtration with its isogeny index.

use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::caps::Caps;
use crate::linalg::{LinalgError, Matrix, Subspace};
use crate::numberfield::{format_rational, FieldError, NumberField, Rational};
use crate::permaction::{
    close_subgroup_in, normalizer_of_subspace, restrict_action, GroupError, Perm, SearchSpace,
};
use crate::reflect::{
    all_reflections_real, coxeter_classify, cst_smoothness, hom_g_dimension, reflection_subgroup,
    tensor_model, CoxeterComponent, ReflectError, SmoothVerdict,
};
use crate::toruslat::{
    isogeny_quotient, translation_filtration, AffineSubtorus, TorusError,
};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("request invalid: {0}")]
    BadRequest(String),
    #[error("field stage: {0}")]
    Field(#[from] FieldError),
    #[error("normalizer stage: {0}")]
    Normalizer(GroupError),
    #[error("restriction stage: {0}")]
    Restriction(GroupError),
    #[error("reflection stage: {0}")]
    Reflection(#[from] ReflectError),
    #[error("filtration stage: {0}")]
    Filtration(#[from] TorusError),
    #[error("linear algebra: {0}")]
    Linalg(#[from] LinalgError),
    #[error("unsupported example: {0}")]
    UnsupportedExample(String),
}

#[derive(Debug, Clone)]
pub struct AnalysisRequest {
    pub k: usize,
    /// Rational basis rows of the subspace `U ⊂ Q^k`.
    pub basis: Vec<Vec<Rational>>,
    /// Offset vector of an affine subtorus; enables the filtration
    /// stages.
    pub offset: Option<Vec<Rational>>,
    /// Generators of a subgroup to search in instead of all of `S_k`.
    pub search_group: Option<Vec<Perm>>,
    /// Work over `Q(ζ_N)` instead of `Q`.
    pub field_hint: Option<u32>,
    pub caps: Caps,
}

impl AnalysisRequest {
    pub fn new(k: usize, basis: Vec<Vec<Rational>>) -> AnalysisRequest {
        AnalysisRequest {
            k,
            basis,
            offset: None,
            search_group: None,
            field_hint: None,
            caps: Caps::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct ComponentReport {
    #[serde(rename = "type")]
    pub type_label: String,
    pub rank: usize,
    pub crystallographic: bool,
    /// Primitive integer simple roots in ambient coordinates.
    pub simple_roots: Vec<Vec<String>>,
}

impl ComponentReport {
    fn from_component(c: &CoxeterComponent) -> ComponentReport {
        ComponentReport {
            type_label: c.coxeter_type.label(),
            rank: c.coxeter_type.rank(),
            crystallographic: c.crystallographic,
            simple_roots: c
                .simple_roots
                .iter()
                .map(|r| r.iter().map(|x| x.to_string()).collect())
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct FiltrationReport {
    pub g_affine_order: usize,
    pub g1_order: usize,
    pub g0_order: usize,
    /// Orders of the nonzero translations of `G_1` elements, sorted.
    pub translation_orders: Vec<String>,
    pub isogeny_index: String,
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct DoubledModuleReport {
    pub copies: usize,
    pub component_dim: usize,
    pub total_dim: usize,
    /// Dimension of the equivariant endomorphisms of the component;
    /// 1 certifies irreducibility of the induced action.
    pub endo_dim: usize,
    pub certificate_is_identity: bool,
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct AnalysisReport {
    pub schema_version: u32,
    pub k: usize,
    pub subspace_dim: usize,
    pub group_order: usize,
    pub kernel_order: usize,
    pub induced_order: usize,
    pub reflection_count: usize,
    pub smooth: bool,
    /// Cycle string of a non-reflection witness when singular.
    pub witness: Option<String>,
    pub all_real: bool,
    pub coxeter_components: Vec<ComponentReport>,
    pub weyl_product: bool,
    pub doubled_module: DoubledModuleReport,
    pub filtration: Option<FiltrationReport>,
    pub gram_nondegenerate: bool,
    /// The subspace is not contained in any pairwise-equal diagonal
    /// `{x_i = x_j}` (the distinct-locus hypothesis, checked on the
    /// linear model).
    pub distinct_locus_ok: bool,
}

impl AnalysisReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

pub fn analyze(req: &AnalysisRequest) -> Result<AnalysisReport, PipelineError> {
    let k = req.k;
    if k == 0 {
        return Err(PipelineError::BadRequest("k must be positive".into()));
    }
    for row in &req.basis {
        if row.len() != k {
            return Err(PipelineError::BadRequest(format!(
                "basis row has {} entries, expected {k}",
                row.len()
            )));
        }
    }
    if let Some(c) = &req.offset {
        if c.len() != k {
            return Err(PipelineError::BadRequest(format!(
                "offset has {} entries, expected {k}",
                c.len()
            )));
        }
    }
    let field = match req.field_hint {
        Some(n) => NumberField::cyclotomic(n, req.caps.cyclotomic_n)?,
        None => NumberField::rationals(),
    };
    let u = if field.is_rational() {
        Subspace::from_rational_rows(k, req.basis.clone())
    } else {
        let rows = req
            .basis
            .iter()
            .map(|r| r.iter().map(|x| field.from_rational(x.clone())).collect())
            .collect();
        Subspace::from_generators(k, &Matrix::from_rows(&field, rows))
    };

    // Normalizer of U inside S_k or the supplied subgroup.
    let group = match &req.search_group {
        Some(gens) => {
            let g = close_subgroup_in(k, gens, req.caps.group_order)
                .map_err(PipelineError::Normalizer)?;
            normalizer_of_subspace(&u, SearchSpace::Within(&g))
                .map_err(PipelineError::Normalizer)?
        }
        None => normalizer_of_subspace(
            &u,
            SearchSpace::FullSymmetric {
                cap_k: req.caps.full_search_k,
            },
        )
        .map_err(PipelineError::Normalizer)?,
    };

    let (induced, kernel) = restrict_action(&group, &u).map_err(PipelineError::Restriction)?;
    let max_order = req.caps.max_element_order;
    let (refls, _) = reflection_subgroup(&induced, max_order)?;
    let verdict = cst_smoothness(&induced, max_order)?;
    let all_real = all_reflections_real(&induced, max_order)?;
    let (smooth, witness) = match &verdict {
        SmoothVerdict::Smooth => (true, None),
        SmoothVerdict::Singular { witness } => {
            let label = induced
                .labels()
                .and_then(|ls| {
                    induced
                        .elements()
                        .iter()
                        .position(|m| m == witness)
                        .map(|i| ls[i].cycle_string())
                })
                .unwrap_or_else(|| "<matrix witness>".to_string());
            (false, Some(label))
        }
    };

    let components = if smooth && all_real && !refls.is_empty() {
        coxeter_classify(&induced, None, max_order)?
            .iter()
            .map(ComponentReport::from_component)
            .collect()
    } else {
        Vec::new()
    };
    let weyl_product =
        smooth && all_real && !components.is_empty() && components.iter().all(|c| c.crystallographic);

    let doubled = tensor_model(&u);
    // Equivariant endomorphisms of the induced module, computed in its
    // own coordinates.
    let coord_space = Subspace::full(u.dim(), induced.field());
    let endo_dim = hom_g_dimension(&induced, &coord_space, &coord_space)?;
    let doubled_report = DoubledModuleReport {
        copies: doubled.copies,
        component_dim: u.dim(),
        total_dim: doubled.total_dim,
        endo_dim,
        certificate_is_identity: doubled.certificate.is_identity(),
    };

    let filtration = match &req.offset {
        Some(c) if field.is_rational() => {
            let torus = AffineSubtorus::new(u.clone(), c.clone())?;
            let f = translation_filtration(&torus, &group)?;
            let mut orders: Vec<String> = f
                .translations
                .iter()
                .filter(|(_, t)| t.iter().any(|x| !x.is_zero()))
                .filter_map(|(_, t)| f.translation_order(torus.lattice(), t))
                .map(|o| o.to_string())
                .collect();
            orders.sort();
            let nonzero: Vec<Vec<Rational>> = f
                .translations
                .iter()
                .map(|(_, t)| t.clone())
                .filter(|t| t.iter().any(|x| !x.is_zero()))
                .collect();
            let (_, index) = isogeny_quotient(&torus, &nonzero)?;
            Some(FiltrationReport {
                g_affine_order: f.g_affine.order(),
                g1_order: f.g1.order(),
                g0_order: f.g0.order(),
                translation_orders: orders,
                isogeny_index: index.to_string(),
            })
        }
        Some(_) => {
            return Err(PipelineError::BadRequest(
                "filtration requires a rational subspace (no field_hint)".into(),
            ))
        }
        None => None,
    };

    // Gram non-degeneracy checked on the rational input basis.
    let rational_u = Subspace::from_rational_rows(k, req.basis.clone());
    let gram_nondegenerate = rational_u.gram_rank()? == rational_u.dim();

    // Distinct-locus flag: U must not lie in any diagonal {x_i = x_j}.
    let b = rational_u.basis();
    let distinct_locus_ok = rational_u.dim() > 0
        && (0..k).all(|i| {
            ((i + 1)..k).all(|j| {
                // Some basis vector separates coordinates i and j.
                (0..b.rows()).any(|r| b.at(r, i) != b.at(r, j))
            })
        });

    Ok(AnalysisReport {
        schema_version: SCHEMA_VERSION,
        k,
        subspace_dim: u.dim(),
        group_order: group.order(),
        kernel_order: kernel.order(),
        induced_order: induced.order(),
        reflection_count: refls.len(),
        smooth,
        witness,
        all_real,
        coxeter_components: components,
        weyl_product,
        doubled_module: doubled_report,
        filtration,
        gram_nondegenerate,
        distinct_locus_ok,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GinzburgType {
    A,
    B,
}

/// Standard test inputs: type A rank `n` is the sum-zero subspace of
/// `Q^{n+1}`; type B rank `n` is `span(e1−e2, e3−e4, …) ⊂ Q^{2n}`,
/// whose normalizer induces the hyperoctahedral action.
pub fn ginzburg_example(t: GinzburgType, rank: usize) -> Result<AnalysisRequest, PipelineError> {
    let basis_row = |k: usize, i: usize, j: usize| {
        let mut r = vec![Rational::zero(); k];
        r[i] = Rational::from_integer(1.into());
        r[j] = Rational::from_integer((-1).into());
        r
    };
    match t {
        GinzburgType::A => {
            if rank == 0 || rank > 5 {
                return Err(PipelineError::UnsupportedExample(format!(
                    "type A supports rank 1..=5, got {rank}"
                )));
            }
            let k = rank + 1;
            let basis = (0..rank).map(|i| basis_row(k, i, i + 1)).collect();
            Ok(AnalysisRequest::new(k, basis))
        }
        GinzburgType::B => {
            if rank == 0 || rank > 4 {
                return Err(PipelineError::UnsupportedExample(format!(
                    "type B supports rank 1..=4, got {rank}"
                )));
            }
            let k = 2 * rank;
            let basis = (0..rank).map(|i| basis_row(k, 2 * i, 2 * i + 1)).collect();
            Ok(AnalysisRequest::new(k, basis))
        }
    }
}

/// Pretty formatter used by the CLI's table output.
pub fn format_offset(c: &[Rational]) -> String {
    c.iter().map(format_rational).collect::<Vec<_>>().join(",")
}
