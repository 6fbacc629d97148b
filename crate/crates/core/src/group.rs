//! Finite groups as multiplication tables, built by closing a set of
//! permutation generators.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Default bound on the order of a group generated from permutations.
pub const DEFAULT_ORDER_CAP: usize = 5040;

/// Above this order associativity is sampled rather than checked for every triple.
const EXHAUSTIVE_ASSOCIATIVITY_LIMIT: usize = 64;

/// A permutation of `{0..degree-1}` in one-line (image array) notation.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; images.len()];
        for &i in &images {
            if i >= images.len() || std::mem::replace(&mut seen[i], true) {
                return Err(Error::InvalidInput(format!("{images:?} is not a permutation")));
            }
        }
        Ok(Permutation(images))
    }

    pub fn identity(degree: usize) -> Self {
        Permutation((0..degree).collect())
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        Permutation(other.0.iter().map(|&x| self.0[x]).collect())
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.0.len()];
        for (i, &x) in self.0.iter().enumerate() {
            inv[x] = i;
        }
        Permutation(inv)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &x)| i == x)
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// A finite group given by its Cayley table. Element `0` is the identity.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FiniteGroupTable {
    order: usize,
    table: Vec<u32>,
    inverse: Vec<usize>,
    labels: Option<Vec<String>>,
}

impl FiniteGroupTable {
    /// Validates identity, Latin-square, associativity and inverses.
    pub fn from_table(table: Vec<Vec<usize>>) -> Result<Self> {
        let order = table.len();
        if order == 0 {
            return Err(Error::InvalidGroup("empty table".into()));
        }
        if table.iter().any(|row| row.len() != order) {
            return Err(Error::InvalidGroup("table is not square".into()));
        }
        let flat: Vec<u32> = table.iter().flatten().map(|&x| x as u32).collect();
        if table.iter().flatten().any(|&x| x >= order) {
            return Err(Error::InvalidGroup("entry out of range".into()));
        }
        let mut g = FiniteGroupTable {
            order,
            table: flat,
            inverse: Vec::new(),
            labels: None,
        };
        g.validate()?;
        Ok(g)
    }

    fn validate(&mut self) -> Result<()> {
        let m = self.order;
        for j in 0..m {
            if self.mul(0, j) != j || self.mul(j, 0) != j {
                return Err(Error::InvalidGroup("element 0 is not the identity".into()));
            }
        }
        for i in 0..m {
            let mut row = vec![false; m];
            let mut col = vec![false; m];
            for j in 0..m {
                if std::mem::replace(&mut row[self.mul(i, j)], true)
                    || std::mem::replace(&mut col[self.mul(j, i)], true)
                {
                    return Err(Error::InvalidGroup(format!("row or column {i} repeats an element")));
                }
            }
        }
        let assoc = |i: usize, j: usize, k: usize| self.mul(self.mul(i, j), k) == self.mul(i, self.mul(j, k));
        if m <= EXHAUSTIVE_ASSOCIATIVITY_LIMIT {
            for i in 0..m {
                for j in 0..m {
                    for k in 0..m {
                        if !assoc(i, j, k) {
                            return Err(Error::InvalidGroup(format!("({i}*{j})*{k} != {i}*({j}*{k})")));
                        }
                    }
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(m as u64);
            for _ in 0..EXHAUSTIVE_ASSOCIATIVITY_LIMIT.pow(3) {
                let (i, j, k) = (rng.gen_range(0..m), rng.gen_range(0..m), rng.gen_range(0..m));
                if !assoc(i, j, k) {
                    return Err(Error::InvalidGroup(format!("({i}*{j})*{k} != {i}*({j}*{k})")));
                }
            }
        }
        self.inverse = (0..m)
            .map(|i| {
                (0..m)
                    .find(|&j| self.mul(i, j) == 0)
                    .expect("Latin square row contains 0")
            })
            .collect();
        Ok(())
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Index of `g_i g_j`.
    #[inline]
    pub fn mul(&self, i: usize, j: usize) -> usize {
        self.table[i * self.order + j] as usize
    }

    pub fn inverse(&self, i: usize) -> usize {
        self.inverse[i]
    }

    /// Row `i` of the table: `j -> index(g_i g_j)`.
    pub fn row(&self, i: usize) -> &[u32] {
        &self.table[i * self.order..(i + 1) * self.order]
    }

    pub fn to_rows(&self) -> Vec<Vec<usize>> {
        (0..self.order)
            .map(|i| self.row(i).iter().map(|&x| x as usize).collect())
            .collect()
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.order {
            return Err(Error::InvalidInput("one label per element required".into()));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|i| (0..i).all(|j| self.mul(i, j) == self.mul(j, i)))
    }
}

/// A group table together with the permutations that realise it.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PermutationGroup {
    pub generators: Vec<Permutation>,
    pub elements: Vec<Permutation>,
    pub table: FiniteGroupTable,
}

/// Closes `generators` under composition by breadth-first search.
///
/// Generators are sorted and deduplicated first. Element 0 is the identity;
/// the rest follow in discovery order, where each dequeued element `e` is
/// extended by `e ∘ s` for every generator `s` in sorted order.
pub fn group_from_generators(degree: usize, generators: &[Permutation], cap: usize) -> Result<PermutationGroup> {
    if degree == 0 {
        return Err(Error::InvalidInput("permutation degree must be positive".into()));
    }
    if let Some(bad) = generators.iter().find(|g| g.degree() != degree) {
        return Err(Error::InvalidInput(format!(
            "generator {bad} does not act on {degree} points"
        )));
    }
    let mut gens = generators.to_vec();
    gens.sort();
    gens.dedup();

    let id = Permutation::identity(degree);
    let mut index: HashMap<Permutation, usize> = HashMap::from([(id.clone(), 0)]);
    let mut elements = vec![id];
    let mut queue = VecDeque::from([0usize]);
    while let Some(e) = queue.pop_front() {
        for s in &gens {
            let next = elements[e].compose(s);
            if !index.contains_key(&next) {
                if elements.len() == cap {
                    return Err(Error::GroupTooLarge { cap });
                }
                index.insert(next.clone(), elements.len());
                queue.push_back(elements.len());
                elements.push(next);
            }
        }
    }
    let table: Vec<Vec<usize>> = elements
        .iter()
        .map(|a| elements.iter().map(|b| index[&a.compose(b)]).collect())
        .collect();
    let labels = elements.iter().map(ToString::to_string).collect();
    let table = FiniteGroupTable::from_table(table)?.with_labels(labels)?;
    Ok(PermutationGroup {
        generators: gens,
        elements,
        table,
    })
}

/// A group as named built-in or explicit generator list.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GroupSpec {
    pub name: Option<String>,
    pub degree: usize,
    pub generators: Vec<Permutation>,
}

fn perm(images: &[usize]) -> Permutation {
    Permutation::new(images.to_vec()).expect("built-in generator is a permutation")
}

impl GroupSpec {
    pub const BUILTINS: [&'static str; 6] = ["trivial", "c2", "s3", "d4", "q8", "a5"];

    pub fn builtin(name: &str) -> Option<Self> {
        let (degree, generators) = match name {
            "trivial" => (1, vec![perm(&[0])]),
            "c2" => (2, vec![perm(&[1, 0])]),
            "s3" => (3, vec![perm(&[1, 0, 2]), perm(&[1, 2, 0])]),
            // rotation and a reflection of a square with vertices 0..3
            "d4" => (4, vec![perm(&[1, 2, 3, 0]), perm(&[0, 3, 2, 1])]),
            // left multiplication by i and j on (1, -1, i, -i, j, -j, k, -k)
            "q8" => (
                8,
                vec![perm(&[2, 3, 1, 0, 6, 7, 5, 4]), perm(&[4, 5, 7, 6, 1, 0, 2, 3])],
            ),
            // (0 1 2) and (2 3 4)
            "a5" => (5, vec![perm(&[1, 2, 0, 3, 4]), perm(&[0, 1, 3, 4, 2])]),
            _ => return None,
        };
        Some(GroupSpec {
            name: Some(name.to_string()),
            degree,
            generators,
        })
    }

    pub fn from_generators(generators: Vec<Permutation>) -> Result<Self> {
        let degree = generators
            .first()
            .map(Permutation::degree)
            .ok_or_else(|| Error::InvalidInput("no generators given".into()))?;
        Ok(GroupSpec {
            name: None,
            degree,
            generators,
        })
    }

    /// Parses a built-in name, or generators in one-line notation separated
    /// by `;`, e.g. `"1,0,2; 1,2,0"`. Brackets are ignored, so the JSON form
    /// `[[1,0,2],[1,2,0]]` is accepted too.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let lower = s.to_ascii_lowercase();
        if let Some(spec) = Self::builtin(&lower) {
            return Ok(spec);
        }
        let normalized = s.replace("],", ";").replace(['[', ']'], "");
        let generators = normalized
            .split(';')
            .filter(|g| !g.trim().is_empty())
            .map(|g| {
                let images = g
                    .split(|c: char| c == ',' || c.is_whitespace())
                    .filter(|t| !t.is_empty())
                    .map(|t| {
                        t.parse::<usize>()
                            .map_err(|_| Error::InvalidInput(format!("bad group spec {s:?}")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Permutation::new(images)
            })
            .collect::<Result<Vec<_>>>()?;
        if generators.is_empty() {
            return Err(Error::InvalidInput(format!(
                "unknown group {s:?}; expected one of {:?} or generator permutations",
                Self::BUILTINS
            )));
        }
        if generators.iter().any(|g| g.degree() != generators[0].degree()) {
            return Err(Error::InvalidInput(
                "generators act on different numbers of points".into(),
            ));
        }
        Self::from_generators(generators)
    }

    pub fn build(&self) -> Result<PermutationGroup> {
        self.build_with_cap(DEFAULT_ORDER_CAP)
    }

    pub fn build_with_cap(&self, cap: usize) -> Result<PermutationGroup> {
        group_from_generators(self.degree, &self.generators, cap)
    }
}
