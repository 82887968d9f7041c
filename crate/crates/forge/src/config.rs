//! Run configuration, read from TOML. See `docs/config.md` for the schema.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// A rational written as `"p/q"` or `"p"`.
pub type Rat = String;

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(default)]
    pub etale: BTreeMap<String, EtaleRecipe>,
    #[serde(default)]
    pub algebra: BTreeMap<String, AlgebraRecipe>,
    #[serde(default)]
    pub structure: BTreeMap<String, StructureRecipe>,
    #[serde(default)]
    pub suite: SuiteConfig,
    #[serde(default)]
    pub isotope: Vec<IsotopeTask>,
    #[serde(default)]
    pub verify_iso: Vec<VerifyIsoTask>,
    #[serde(default)]
    pub extend_aut: Vec<ExtendAutTask>,
    #[serde(default)]
    pub word: Vec<WordTask>,
    #[serde(default)]
    pub fixed: Vec<FixedTask>,
    #[serde(default)]
    pub conformal: Vec<ConformalTask>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase", deny_unknown_fields)]
pub enum EtaleRecipe {
    Rational,
    SplitQuadratic,
    QuadraticField {
        d: Rat,
    },
    SplitCubic,
    /// `min_poly` low-to-high, monic; `generator_image` is `ρ(θ)` low-to-high.
    #[serde(rename_all = "snake_case")]
    CyclicCubicField {
        min_poly: [Rat; 4],
        generator_image: [Rat; 3],
    },
    Composite {
        cubic: String,
        quadratic: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum InvolutionName {
    ConjTranspose,
    Transpose,
    StandardCrossed,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "camelCase", deny_unknown_fields)]
pub enum AlgebraRecipe {
    Mat3 {
        base: String,
        #[serde(default = "conj_transpose")]
        involution: InvolutionName,
    },
    /// `γ` is given in coordinates of the center.
    Crossed {
        cubic: String,
        gamma: Vec<Rat>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        involution: Option<InvolutionName>,
    },
    DoubleOpposite {
        inner: String,
    },
    Etale {
        field: String,
    },
}

fn conj_transpose() -> InvolutionName {
    InvolutionName::ConjTranspose
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase", deny_unknown_fields)]
pub enum StructureRecipe {
    /// `N` the étale norm on a cubic étale algebra.
    Etale { field: String },
    /// Hermitian elements of an algebra with involution, `N` the reduced norm.
    Hermitian { algebra: String },
    /// `J(B, σ, u, μ)`; `u` defaults to `1`, `μ` in center coordinates.
    Tits {
        algebra: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        u: Option<Vec<Rat>>,
        mu: Vec<Rat>,
    },
    /// First construction over an algebra with center `Q`.
    First {
        algebra: String,
        mu: Rat,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        u: Option<Vec<Rat>>,
    },
    /// `J^(v)`, `v` in carrier coordinates of `of`.
    Isotope { of: String, v: Vec<Rat> },
    Mutated { of: String, mutation: Mutation },
    /// A named shipped construction.
    Catalog {
        name: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        mu: Option<Rat>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        gamma: Option<Rat>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "camelCase", deny_unknown_fields)]
pub enum Mutation {
    AdjointSwap { i: usize, j: usize },
    NormPerturbation { monomial: [usize; 3], delta: Rat },
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    /// Structures to run the axiom suite on.
    #[serde(default)]
    pub axioms: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IsotopeTask {
    pub structure: String,
    pub v: Vec<Rat>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyIsoTask {
    pub structure: String,
    /// Hermitian element of the underlying associative algebra.
    pub v: Vec<Rat>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AutomorphismName {
    /// `ρ̃` on a Tits process over `LK`.
    Galois,
    /// Conjugation by `(P, P⁻¹)` on a first construction over `M3(Q)`.
    CyclicPermutation,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtendAutTask {
    pub structure: String,
    pub automorphism: AutomorphismName,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coords {
    /// `"c"`, the base point.
    Named(String),
    Explicit(Vec<Rat>),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub enum GeneratorSpec {
    ScalarHomothety(Rat),
    UOperator(Coords),
    Automorphism(AutomorphismName),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WordTask {
    pub structure: String,
    pub generators: Vec<GeneratorSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect_nu: Option<Rat>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixedTask {
    pub structure: String,
    pub generators: Vec<GeneratorSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect_dim: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub enum LetterSpec {
    Translate(Vec<Rat>),
    InvertJ,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConformalTask {
    pub structure: String,
    /// Optional word, written left to right, whose domain is sampled.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub letters: Vec<LetterSpec>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }
}
