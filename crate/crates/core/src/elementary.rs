//! Expansion of derivative words into elementary differentials.
//!
//! Applying `X·∇` to a contraction of derivative tensors of `V` hits every
//! tensor once (Leibniz). Starting from `V` and applying the letters right to
//! left therefore yields an integer combination of trees: each node is a
//! symmetric tensor `∇ⁿV(q)`, each edge a contraction through `M`, and each
//! leaf either the momentum `M p` or another tensor node. `D̄` inserts the
//! node `∇V` itself, `𝒟` inserts a momentum leaf.
//!
//! A [`WordProgram`] interns every distinct subtree of a word list into one
//! DAG so that a model only has to supply `∇ᵏ⁺¹V[d₁ … dₖ, ·]`
//! ([`DerivativeTensors`]). Values are computed bottom-up and gradients by a
//! reverse sweep over the same DAG.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::mass::MassStructure;
use crate::model::{DerivativeTensors, Gradients};
use crate::real::Real;
use crate::word::{Letter, Word};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum Child {
    Momentum,
    Node(Tree),
}

/// A tensor node with its (sorted) children.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct Tree {
    children: Vec<Child>,
}

impl Tree {
    fn gradient() -> Child {
        Child::Node(Tree::default())
    }

    /// Every way of attaching `add` to one node of `self`.
    fn extensions(&self, add: &Child) -> Vec<Tree> {
        let mut out = Vec::new();
        let mut t = self.clone();
        t.children.push(add.clone());
        t.children.sort();
        out.push(t);
        for (i, ch) in self.children.iter().enumerate() {
            if let Child::Node(sub) = ch {
                for ext in sub.extensions(add) {
                    let mut t = self.clone();
                    t.children[i] = Child::Node(ext);
                    t.children.sort();
                    out.push(t);
                }
            }
        }
        out
    }
}

/// Integer combination of root trees equal to `word` applied to `V`.
fn expand(word: &Word) -> BTreeMap<Tree, i64> {
    let mut expr = BTreeMap::new();
    if word.is_dbar3() {
        let g = Tree::gradient();
        expr.insert(
            Tree {
                children: vec![g.clone(), g.clone(), g],
            },
            1,
        );
        return expr;
    }
    expr.insert(Tree::default(), 1);
    for &letter in word.letters().iter().rev() {
        let add = match letter {
            Letter::Dp => Child::Momentum,
            Letter::Dg => Tree::gradient(),
        };
        let mut next = BTreeMap::new();
        for (tree, c) in &expr {
            for ext in tree.extensions(&add) {
                *next.entry(ext).or_insert(0) += c;
            }
        }
        next.retain(|_, c| *c != 0);
        expr = next;
    }
    expr
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum Slot {
    Momentum,
    Node(usize),
}

#[derive(Debug, Clone)]
struct Root {
    children: Vec<Slot>,
    /// `(word index, multiplicity)`.
    terms: Vec<(usize, i64)>,
}

/// Interned elementary-differential DAG for a list of words.
#[derive(Debug)]
pub struct WordProgram {
    words: Vec<Word>,
    /// Children of each vector node; children always precede parents.
    nodes: Vec<Vec<Slot>>,
    roots: Vec<Root>,
}

impl WordProgram {
    pub fn new(words: Vec<Word>) -> Self {
        let mut interned: HashMap<Tree, usize> = HashMap::new();
        let mut nodes: Vec<Vec<Slot>> = Vec::new();
        let mut roots: BTreeMap<Vec<Slot>, Vec<(usize, i64)>> = BTreeMap::new();
        for (wi, word) in words.iter().enumerate() {
            for (tree, mult) in expand(word) {
                let mut slots: Vec<Slot> = tree
                    .children
                    .iter()
                    .map(|c| intern_child(c, &mut interned, &mut nodes))
                    .collect();
                slots.sort();
                roots.entry(slots).or_default().push((wi, mult));
            }
        }
        Self {
            words,
            nodes,
            roots: roots
                .into_iter()
                .map(|(children, terms)| Root { children, terms })
                .collect(),
        }
    }

    /// Shared program for `words`, built once per distinct list.
    pub fn cached(words: &[Word]) -> Arc<WordProgram> {
        static CACHE: OnceLock<Mutex<HashMap<Vec<Word>, Arc<WordProgram>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().expect("program cache poisoned");
        guard
            .entry(words.to_vec())
            .or_insert_with(|| Arc::new(WordProgram::new(words.to_vec())))
            .clone()
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn root_count(&self) -> usize {
        self.roots.len()
    }

    /// Integer tree expansion of one word as `(multiplicity, description)`,
    /// with `p` a momentum leaf and `g(…)` a tensor node.
    pub fn describe(word: &Word) -> Vec<(i64, String)> {
        fn show(t: &Tree) -> String {
            let inner: Vec<String> = t
                .children
                .iter()
                .map(|c| match c {
                    Child::Momentum => "p".to_string(),
                    Child::Node(s) => show(s),
                })
                .collect();
            format!("g({})", inner.join(","))
        }
        expand(word).iter().map(|(t, c)| (*c, show(t))).collect()
    }
}

fn intern_child(child: &Child, interned: &mut HashMap<Tree, usize>, nodes: &mut Vec<Vec<Slot>>) -> Slot {
    match child {
        Child::Momentum => Slot::Momentum,
        Child::Node(t) => {
            if let Some(&i) = interned.get(t) {
                return Slot::Node(i);
            }
            let mut slots: Vec<Slot> = t
                .children
                .iter()
                .map(|c| intern_child(c, interned, nodes))
                .collect();
            slots.sort();
            nodes.push(slots);
            let i = nodes.len() - 1;
            interned.insert(t.clone(), i);
            Slot::Node(i)
        }
    }
}

/// Forward values of all vector nodes plus the raised momentum.
struct Forward<T> {
    momentum: Vec<T>,
    nodes: Vec<Vec<T>>,
}

impl<T: Real> Forward<T> {
    fn slot(&self, s: Slot) -> &[T] {
        match s {
            Slot::Momentum => &self.momentum,
            Slot::Node(i) => &self.nodes[i],
        }
    }

    fn dirs<'a>(&'a self, slots: &[Slot]) -> Vec<&'a [T]> {
        slots.iter().map(|&s| self.slot(s)).collect()
    }
}

fn forward<T: Real, D: DerivativeTensors<T>>(
    model: &D,
    mass: &MassStructure<T>,
    program: &WordProgram,
    q: &[T],
    p: &[T],
) -> Forward<T> {
    let n = q.len();
    let mut fw = Forward {
        momentum: mass.apply(p),
        nodes: Vec::with_capacity(program.nodes.len()),
    };
    let mut cov = vec![T::zero(); n];
    for children in &program.nodes {
        let dirs = fw.dirs(children);
        model.contract_into(q, &dirs, &mut cov);
        let mut y = vec![T::zero(); n];
        mass.apply_into(&cov, &mut y);
        fw.nodes.push(y);
    }
    fw
}

fn check<T: Real>(program: &WordProgram, mass: &MassStructure<T>, q: &[T], p: &[T], weights: Option<&[T]>) -> Result<()> {
    let dim = mass.dim();
    for v in [q, p] {
        if v.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: v.len(),
            });
        }
    }
    if let Some(w) = weights {
        if w.len() != program.words.len() {
            return Err(Error::DimensionMismatch {
                expected: program.words.len(),
                got: w.len(),
            });
        }
    }
    Ok(())
}

/// Value of every word of `program` at `(q, p)`.
pub fn word_values<T: Real, D: DerivativeTensors<T>>(
    model: &D,
    mass: &MassStructure<T>,
    program: &WordProgram,
    q: &[T],
    p: &[T],
) -> Result<Vec<T>> {
    check(program, mass, q, p, None)?;
    let fw = forward(model, mass, program, q, p);
    let mut out = vec![T::zero(); program.words.len()];
    let mut cov = vec![T::zero(); q.len()];
    for root in &program.roots {
        let (last, rest) = root.children.split_last().expect("roots have children");
        model.contract_into(q, &fw.dirs(rest), &mut cov);
        let s = crate::real::dot(&cov, fw.slot(*last));
        for &(wi, m) in &root.terms {
            out[wi] += T::lit(m as f64) * s;
        }
    }
    if out.iter().any(|v| !v.is_finite()) {
        return Err(Error::Singular("word values".into()));
    }
    Ok(out)
}

/// `(slot, multiplicity, directions with one copy of slot removed)` for each
/// distinct child.
fn distinct_children(children: &[Slot]) -> Vec<(Slot, usize, Vec<Slot>)> {
    let mut out: Vec<(Slot, usize, Vec<Slot>)> = Vec::new();
    for (i, &s) in children.iter().enumerate() {
        if let Some(e) = out.iter_mut().find(|e| e.0 == s) {
            e.1 += 1;
            continue;
        }
        let mut rest = children.to_vec();
        rest.remove(i);
        out.push((s, 1, rest));
    }
    out
}

fn axpy<T: Real>(acc: &mut [T], a: T, x: &[T]) {
    for (y, &v) in acc.iter_mut().zip(x) {
        *y += a * v;
    }
}

/// Gradients of `Σᵢ weights[i]·wordᵢ(q, p)`.
pub fn combination_gradients<T: Real, D: DerivativeTensors<T>>(
    model: &D,
    mass: &MassStructure<T>,
    program: &WordProgram,
    weights: &[T],
    q: &[T],
    p: &[T],
    with_p: bool,
) -> Result<Gradients<T>> {
    check(program, mass, q, p, Some(weights))?;
    let n = q.len();
    let fw = forward(model, mass, program, q, p);
    let mut grad_q = vec![T::zero(); n];
    let mut adj_nodes: Vec<Option<Vec<T>>> = vec![None; program.nodes.len()];
    let mut adj_momentum = vec![T::zero(); n];
    let mut cov = vec![T::zero(); n];

    let add_adjoint = |slot: Slot, scale: T, v: &[T], adj_nodes: &mut Vec<Option<Vec<T>>>, adj_momentum: &mut Vec<T>| match slot {
        Slot::Momentum => axpy(adj_momentum, scale, v),
        Slot::Node(i) => {
            let a = adj_nodes[i].get_or_insert_with(|| vec![T::zero(); n]);
            axpy(a, scale, v);
        }
    };

    for root in &program.roots {
        let w = crate::real::sum(root.terms.iter().map(|&(wi, m)| weights[wi] * T::lit(m as f64)));
        if w == T::zero() {
            continue;
        }
        model.contract_into(q, &fw.dirs(&root.children), &mut cov);
        axpy(&mut grad_q, w, &cov);
        for (slot, count, rest) in distinct_children(&root.children) {
            model.contract_into(q, &fw.dirs(&rest), &mut cov);
            add_adjoint(slot, w * T::lit(count as f64), &cov, &mut adj_nodes, &mut adj_momentum);
        }
    }

    let mut raised = vec![T::zero(); n];
    for idx in (0..program.nodes.len()).rev() {
        let Some(adj) = adj_nodes[idx].take() else {
            continue;
        };
        mass.apply_into(&adj, &mut raised);
        let children = &program.nodes[idx];
        let mut dirs = fw.dirs(children);
        dirs.push(&raised);
        model.contract_into(q, &dirs, &mut cov);
        axpy(&mut grad_q, T::one(), &cov);
        for (slot, count, rest) in distinct_children(children) {
            let mut dirs = fw.dirs(&rest);
            dirs.push(&raised);
            model.contract_into(q, &dirs, &mut cov);
            add_adjoint(slot, T::lit(count as f64), &cov, &mut adj_nodes, &mut adj_momentum);
        }
    }

    let grad_p = with_p.then(|| mass.apply(&adj_momentum));
    if grad_q.iter().chain(grad_p.iter().flatten()).any(|v| !v.is_finite()) {
        return Err(Error::Singular("word gradients".into()));
    }
    Ok(Gradients {
        q: grad_q,
        p: grad_p,
    })
}

/// Single-word helpers built on cached one-word programs.
pub fn word_value<T: Real, D: DerivativeTensors<T>>(
    model: &D,
    mass: &MassStructure<T>,
    word: &Word,
    q: &[T],
    p: &[T],
) -> Result<T> {
    let prog = WordProgram::cached(std::slice::from_ref(word));
    Ok(word_values(model, mass, &prog, q, p)?[0])
}

pub fn word_gradients<T: Real, D: DerivativeTensors<T>>(
    model: &D,
    mass: &MassStructure<T>,
    word: &Word,
    q: &[T],
    p: &[T],
) -> Result<Gradients<T>> {
    let prog = WordProgram::cached(std::slice::from_ref(word));
    combination_gradients(model, mass, &prog, &[T::one()], q, p, true)
}
