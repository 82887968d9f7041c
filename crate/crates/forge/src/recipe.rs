//! Resolution of named recipes into built objects.

use std::collections::BTreeMap;
use std::sync::Arc;

use albert_core::assoc::{AssocAlgebra, AssocElement, BaseInvolution};
use albert_core::catalog;
use albert_core::cubic::CubicNormStructure;
use albert_core::etale::{EtaleElement, EtaleKind, EtaleSpec};
use albert_core::mutation::{AdjointSwap, NormPerturbation};
use albert_core::tits::{build_first_construction, build_tits, etale_structure, hermitian_structure, isotope, TitsProcessAlgebra};
use albert_core::Q;

use crate::config::{AlgebraRecipe, EtaleRecipe, InvolutionName, Mutation, Rat, RunConfig, StructureRecipe};
use crate::error::ForgeError;

pub fn parse_rat(s: &str) -> Result<Q, ForgeError> {
    s.trim()
        .parse::<Q>()
        .map_err(|_| ForgeError::Config(format!("not a rational: {s:?}")))
}

pub fn parse_rats(v: &[Rat]) -> Result<Vec<Q>, ForgeError> {
    v.iter().map(|s| parse_rat(s)).collect()
}

fn parse_array<const N: usize>(v: &[Rat; N]) -> Result<[Q; N], ForgeError> {
    let parsed = parse_rats(v)?;
    Ok(parsed.try_into().expect("length preserved"))
}

/// A built structure, with its Tits process when it came from one.
#[derive(Clone)]
pub struct Built {
    pub name: String,
    pub structure: CubicNormStructure,
    pub tits: Option<TitsProcessAlgebra>,
}

/// Lazily resolves names; cycles and dangling references are config errors.
pub struct Registry<'c> {
    config: &'c RunConfig,
    etale: BTreeMap<String, Arc<EtaleSpec>>,
    algebra: BTreeMap<String, Arc<AssocAlgebra>>,
    structure: BTreeMap<String, Built>,
    in_progress: Vec<String>,
}

impl<'c> Registry<'c> {
    pub fn new(config: &'c RunConfig) -> Self {
        Registry {
            config,
            etale: BTreeMap::new(),
            algebra: BTreeMap::new(),
            structure: BTreeMap::new(),
            in_progress: Vec::new(),
        }
    }

    fn enter(&mut self, kind: &str, name: &str) -> Result<(), ForgeError> {
        let key = format!("{kind}.{name}");
        if self.in_progress.contains(&key) {
            return Err(ForgeError::Config(format!("cyclic reference through {key}")));
        }
        self.in_progress.push(key);
        Ok(())
    }

    fn leave(&mut self) {
        self.in_progress.pop();
    }

    fn etale_kind(&mut self, name: &str) -> Result<EtaleKind, ForgeError> {
        Ok(self.etale(name)?.kind().clone())
    }

    pub fn etale(&mut self, name: &str) -> Result<Arc<EtaleSpec>, ForgeError> {
        if let Some(e) = self.etale.get(name) {
            return Ok(e.clone());
        }
        let recipe = self
            .config
            .etale
            .get(name)
            .ok_or_else(|| ForgeError::Config(format!("unknown étale spec {name:?}")))?
            .clone();
        self.enter("etale", name)?;
        let kind = match recipe {
            EtaleRecipe::Rational => EtaleKind::Rational,
            EtaleRecipe::SplitQuadratic => EtaleKind::SplitQuadratic,
            EtaleRecipe::QuadraticField { d } => EtaleKind::quadratic_field(parse_rat(&d)?),
            EtaleRecipe::SplitCubic => EtaleKind::SplitCubic,
            EtaleRecipe::CyclicCubicField {
                min_poly,
                generator_image,
            } => EtaleKind::cyclic_cubic(parse_array(&min_poly)?, parse_array(&generator_image)?),
            EtaleRecipe::Composite { cubic, quadratic } => {
                EtaleKind::composite(self.etale_kind(&cubic)?, self.etale_kind(&quadratic)?)
            }
        };
        self.leave();
        let spec = EtaleSpec::new(kind).map_err(|e| ForgeError::build(name, e))?;
        self.etale.insert(name.to_string(), spec.clone());
        Ok(spec)
    }

    pub fn algebra(&mut self, name: &str) -> Result<Arc<AssocAlgebra>, ForgeError> {
        if let Some(a) = self.algebra.get(name) {
            return Ok(a.clone());
        }
        let recipe = self
            .config
            .algebra
            .get(name)
            .ok_or_else(|| ForgeError::Config(format!("unknown algebra {name:?}")))?
            .clone();
        self.enter("algebra", name)?;
        let built = match recipe {
            AlgebraRecipe::Mat3 { base, involution } => {
                let base = self.etale(&base)?;
                AssocAlgebra::mat3(&base, involution_of(involution))
            }
            AlgebraRecipe::Crossed {
                cubic,
                gamma,
                involution,
            } => {
                let cubic = self.etale(&cubic)?;
                let center = cubic.base();
                let gamma = EtaleElement::new(&center, parse_rats(&gamma)?).map_err(|e| ForgeError::build(name, e))?;
                match involution {
                    Some(inv) => AssocAlgebra::crossed(&cubic, &gamma, involution_of(inv)),
                    None => AssocAlgebra::crossed_without_involution(&cubic, &gamma),
                }
            }
            AlgebraRecipe::DoubleOpposite { inner } => {
                let inner = self.algebra(&inner)?;
                AssocAlgebra::double_opposite(&inner)
            }
            AlgebraRecipe::Etale { field } => {
                let field = self.etale(&field)?;
                AssocAlgebra::etale(&field)
            }
        };
        self.leave();
        let alg = built.map_err(|e| ForgeError::build(name, e))?;
        self.algebra.insert(name.to_string(), alg.clone());
        Ok(alg)
    }

    pub fn structure(&mut self, name: &str) -> Result<Built, ForgeError> {
        if let Some(s) = self.structure.get(name) {
            return Ok(s.clone());
        }
        let recipe = self
            .config
            .structure
            .get(name)
            .ok_or_else(|| ForgeError::Config(format!("unknown structure {name:?}")))?
            .clone();
        self.enter("structure", name)?;
        let built = self.build_structure(name, recipe);
        self.leave();
        let built = built?;
        self.structure.insert(name.to_string(), built.clone());
        Ok(built)
    }

    fn build_structure(&mut self, name: &str, recipe: StructureRecipe) -> Result<Built, ForgeError> {
        let wrap = |e| ForgeError::build(name, e);
        let plain = |structure: CubicNormStructure| Built {
            name: name.to_string(),
            structure,
            tits: None,
        };
        let from_tits = |t: TitsProcessAlgebra| Built {
            name: name.to_string(),
            structure: t.structure().clone(),
            tits: Some(t),
        };
        Ok(match recipe {
            StructureRecipe::Etale { field } => plain(etale_structure(&self.etale(&field)?).map_err(wrap)?),
            StructureRecipe::Hermitian { algebra } => {
                plain(hermitian_structure(&self.algebra(&algebra)?).map_err(wrap)?)
            }
            StructureRecipe::Tits { algebra, u, mu } => {
                let alg = self.algebra(&algebra)?;
                let u = match u {
                    Some(u) => AssocElement::new(&alg, parse_rats(&u)?).map_err(wrap)?,
                    None => AssocElement::one(&alg),
                };
                let mu = EtaleElement::new(alg.center(), parse_rats(&mu)?).map_err(wrap)?;
                from_tits(build_tits(&alg, &u, &mu).map_err(wrap)?)
            }
            StructureRecipe::First { algebra, mu, u } => {
                let alg = self.algebra(&algebra)?;
                let u = match u {
                    Some(u) => Some(AssocElement::new(&alg, parse_rats(&u)?).map_err(wrap)?),
                    None => None,
                };
                from_tits(build_first_construction(&alg, &parse_rat(&mu)?, u.as_ref()).map_err(wrap)?)
            }
            StructureRecipe::Isotope { of, v } => {
                let parent = self.structure(&of)?;
                plain(isotope(&parent.structure, &self.coords(&parent, &v)?).map_err(wrap)?)
            }
            StructureRecipe::Mutated { of, mutation } => {
                let inner = self.structure(&of)?.structure;
                let n = inner.dim();
                let s = match mutation {
                    Mutation::AdjointSwap { i, j } => {
                        if i >= n || j >= n {
                            return Err(ForgeError::Config(format!("adjoint swap index out of range for dimension {n}")));
                        }
                        CubicNormStructure::from_model(AdjointSwap { inner, i, j })
                    }
                    Mutation::NormPerturbation { monomial, delta } => {
                        if monomial.iter().any(|&m| m >= n) {
                            return Err(ForgeError::Config(format!("monomial index out of range for dimension {n}")));
                        }
                        CubicNormStructure::from_model(NormPerturbation {
                            inner,
                            monomial,
                            delta: parse_rat(&delta)?,
                        })
                    }
                };
                plain(s.map_err(wrap)?)
            }
            StructureRecipe::Catalog { name: entry, mu, gamma } => {
                let mu = mu.as_deref().map(parse_rat).transpose()?;
                let gamma = gamma.as_deref().map(parse_rat).transpose()?;
                let one = Q::from_integer(1.into());
                match entry.as_str() {
                    "split-cubic" => plain(catalog::split_cubic().map_err(wrap)?),
                    "sym3" => plain(catalog::mat3_hermitian().map_err(wrap)?),
                    "nine-dim" => from_tits(catalog::nine_dim(&catalog::mu_unit()).map_err(wrap)?),
                    "first-mat3" => from_tits(catalog::first_mat3(mu.as_ref().unwrap_or(&one)).map_err(wrap)?),
                    "second-mat3" => from_tits(catalog::second_mat3().map_err(wrap)?),
                    "first-crossed" => {
                        let two = Q::from_integer(2.into());
                        let five = Q::from_integer(5.into());
                        let g = gamma.unwrap_or(two);
                        from_tits(catalog::first_crossed(&g, mu.as_ref().unwrap_or(&five)).map_err(wrap)?)
                    }
                    other => return Err(ForgeError::Config(format!("unknown catalog entry {other:?}"))),
                }
            }
        })
    }

    /// Carrier coordinates, checked against the structure's dimension.
    pub fn coords(&self, built: &Built, v: &[Rat]) -> Result<Vec<Q>, ForgeError> {
        let v = parse_rats(v)?;
        if v.len() != built.structure.dim() {
            return Err(ForgeError::Config(format!(
                "{}: expected {} coordinates, found {}",
                built.name,
                built.structure.dim(),
                v.len()
            )));
        }
        Ok(v)
    }

    pub fn all_structures(&mut self) -> Result<Vec<Built>, ForgeError> {
        let names: Vec<String> = self.config.structure.keys().cloned().collect();
        names.iter().map(|n| self.structure(n)).collect()
    }
}

fn involution_of(name: InvolutionName) -> BaseInvolution {
    match name {
        InvolutionName::ConjTranspose => BaseInvolution::ConjTranspose,
        InvolutionName::Transpose => BaseInvolution::Transpose,
        InvolutionName::StandardCrossed => BaseInvolution::StandardCrossed,
    }
}
