use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::field::FieldSpec;

/// An exact rational literal from the source text.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Coefficient(pub BigRational);

impl Coefficient {
    pub fn from_i64(n: i64) -> Self {
        Coefficient(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn one() -> Self {
        Coefficient(BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }
}

/// `coefficient * a1 * a2 * ...` over arrow (or basis label) names.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub coeff: Coefficient,
    pub path: Vec<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LinearCombination {
    pub terms: Vec<Term>,
}

impl LinearCombination {
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl fmt::Display for LinearCombination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            let negative = t.coeff.0.is_negative();
            let magnitude = t.coeff.0.abs();
            match (i, negative) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            if !magnitude.is_one() {
                if magnitude.is_integer() {
                    write!(f, "{}*", magnitude.numer())?;
                } else {
                    write!(f, "{}/{}*", magnitude.numer(), magnitude.denom())?;
                }
            }
            write!(f, "{}", t.path.join("*"))?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArrowDecl {
    pub name: String,
    pub source: String,
    pub target: String,
    pub degree: i64,
}

/// A validated dg quiver algebra presentation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraPresentation {
    pub field: FieldSpec,
    pub vertices: Vec<String>,
    pub arrows: Vec<ArrowDecl>,
    pub relations: Vec<LinearCombination>,
    /// Arrows with a nonzero (or explicitly zero) assigned differential.
    pub differentials: Vec<(String, LinearCombination)>,
    pub max_path_length: Option<usize>,
}

impl AlgebraPresentation {
    pub fn arrow(&self, name: &str) -> Option<&ArrowDecl> {
        self.arrows.iter().find(|a| a.name == name)
    }
}

impl fmt::Display for AlgebraPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "field {}", self.field)?;
        writeln!(f, "vertices {}", self.vertices.join(" "))?;
        for a in &self.arrows {
            writeln!(f, "arrow {} : {} -> {} deg {}", a.name, a.source, a.target, a.degree)?;
        }
        for r in &self.relations {
            writeln!(f, "rel {r}")?;
        }
        for (a, d) in &self.differentials {
            writeln!(f, "diff {a} = {d}")?;
        }
        if let Some(n) = self.max_path_length {
            writeln!(f, "max_path_length {n}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleBasisDecl {
    pub label: String,
    pub vertex: String,
    pub degree: i64,
}

/// `act <arrow> : <label> -> <combination of labels>`
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActionDecl {
    pub arrow: String,
    pub source: String,
    pub image: LinearCombination,
}

/// A right dg module given by explicit matrices, as written in a module file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModulePresentation {
    pub name: String,
    pub basis: Vec<ModuleBasisDecl>,
    pub actions: Vec<ActionDecl>,
    pub differentials: Vec<(String, LinearCombination)>,
}

impl fmt::Display for ModulePresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "module {}", self.name)?;
        for b in &self.basis {
            writeln!(f, "basis {} vertex {} deg {}", b.label, b.vertex, b.degree)?;
        }
        for a in &self.actions {
            writeln!(f, "act {} : {} -> {}", a.arrow, a.source, a.image)?;
        }
        for (l, d) in &self.differentials {
            writeln!(f, "diff {l} = {d}")?;
        }
        Ok(())
    }
}

/// Built-in module designators accepted on the command line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModuleDesignator {
    /// `simple(v)`
    Simple(String),
    /// `free(v)[k]`: the summand `e_v A` shifted by `k`.
    Free(String, i64),
    /// `simples_sum`: the direct sum of all simples.
    SimplesSum,
    /// `regular[k]`: `A` itself shifted by `k`.
    Regular(i64),
}

impl fmt::Display for ModuleDesignator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModuleDesignator::Simple(v) => write!(f, "simple({v})"),
            ModuleDesignator::Free(v, 0) => write!(f, "free({v})"),
            ModuleDesignator::Free(v, k) => write!(f, "free({v})[{k}]"),
            ModuleDesignator::SimplesSum => write!(f, "simples_sum"),
            ModuleDesignator::Regular(0) => write!(f, "regular"),
            ModuleDesignator::Regular(k) => write!(f, "regular[{k}]"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Document {
    Algebra(AlgebraPresentation),
    Module(ModulePresentation),
}
