//! Sampling and parsing over a compiled [`Grammar`].
//!
//! Both directions share one unification scheme: a symbol passes its
//! (partially) resolved features down, the child reports the values it
//! settled on, and those are unified back into the production's variables.

use std::rc::Rc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::features::{FeatureBundle, LEXICAL_FEATURES};
use crate::seed::derive_seed;

use super::tree::{Role, SentenceTree, TreeChild, TreeLeaf, TreeNode};
use super::{Grammar, GrammarError, Production, StructureSpec, SymKind, Symbol, Term, LEMMA_FEATURE};

/// Feature id paired with its value (`None` = unbound).
type Bindings = Vec<(u32, Option<u32>)>;

const LOCAL_RETRIES: usize = 16;
const MAX_ATTEMPTS: usize = 200;
const MAX_DEPTH: usize = 32;

#[derive(Debug)]
enum Deriv {
    Node {
        nt: usize,
        feats: Bindings,
        role: Option<Role>,
        children: Vec<Rc<Deriv>>,
    },
    Leaf {
        entry: Option<usize>,
        token: String,
        role: Option<Role>,
    },
}

fn lookup(bindings: &Bindings, feat: u32) -> Option<u32> {
    bindings.iter().find(|(f, _)| *f == feat).and_then(|(_, v)| *v)
}

/// Binds the production's variables from the features passed down to its
/// left-hand side. `None` if a constant clashes.
fn bind_lhs(p: &Production, passed: &Bindings) -> Option<Vec<Option<u32>>> {
    let mut env = vec![None; p.n_vars];
    for &(f, v) in passed {
        let Some(v) = v else { continue };
        let Some((_, term)) = p.lhs_feats.iter().find(|(g, _)| *g == f) else {
            continue;
        };
        match *term {
            Term::Const(c) if c != v => return None,
            Term::Const(_) => {}
            Term::Var(x) => match env[x as usize] {
                Some(old) if old != v => return None,
                _ => env[x as usize] = Some(v),
            },
        }
    }
    Some(env)
}

fn resolve(feats: &[(u32, Term)], env: &[Option<u32>]) -> Bindings {
    feats
        .iter()
        .map(|&(f, t)| {
            let v = match t {
                Term::Const(c) => Some(c),
                Term::Var(x) => env[x as usize],
            };
            (f, v)
        })
        .collect()
}

/// Unifies the values a child settled on into the parent's variables.
fn unify_result(sym: &Symbol, result: &Bindings, env: &mut [Option<u32>]) -> bool {
    for &(f, t) in &sym.feats {
        let Some(r) = lookup(result, f) else { continue };
        match t {
            Term::Const(c) => {
                if c != r {
                    return false;
                }
            }
            Term::Var(x) => match env[x as usize] {
                Some(old) if old != r => return false,
                _ => env[x as usize] = Some(r),
            },
        }
    }
    true
}

fn constraints_hold(p: &Production, env: &[Option<u32>]) -> bool {
    p.constraints.iter().all(|&(a, b)| match (env[a as usize], env[b as usize]) {
        (Some(x), Some(y)) => x != y,
        _ => true,
    })
}

impl Grammar {
    /// Whether lexical entry `e` is compatible with the passed features. An
    /// entry lacking a feature does not match a required value.
    fn entry_matches(&self, e: usize, passed: &Bindings) -> bool {
        let vals = &self.lex_vals[e];
        passed.iter().all(|&(f, v)| match v {
            None => true,
            Some(v) => vals.get(f as usize).copied().flatten() == Some(v),
        })
    }

    fn entry_bindings(&self, e: usize) -> Bindings {
        (0..LEXICAL_FEATURES.len() as u32)
            .map(|f| (f, self.lex_vals[e][f as usize]))
            .collect()
    }
}

struct Sampler<'g> {
    g: &'g Grammar,
    rng: ChaCha8Rng,
}

impl Sampler<'_> {
    fn expand(&mut self, sym: &Symbol, passed: &Bindings, depth: usize) -> Option<(Rc<Deriv>, Bindings)> {
        match &sym.kind {
            SymKind::Literal(tok) => Some((
                Rc::new(Deriv::Leaf {
                    entry: None,
                    token: tok.clone(),
                    role: sym.role,
                }),
                Vec::new(),
            )),
            SymKind::Lexical(cat) => {
                let cands: Vec<usize> = self
                    .g
                    .lexicon()
                    .by_category(*cat)
                    .iter()
                    .copied()
                    .filter(|&e| self.g.entry_matches(e, passed))
                    .collect();
                let &e = cands.choose(&mut self.rng)?;
                Some((
                    Rc::new(Deriv::Leaf {
                        entry: Some(e),
                        token: self.g.lexicon().entry(e).surface.clone(),
                        role: sym.role,
                    }),
                    self.g.entry_bindings(e),
                ))
            }
            SymKind::Nonterminal(nt) => self.expand_nt(*nt, passed, sym.role, depth),
        }
    }

    fn expand_nt(
        &mut self,
        nt: usize,
        passed: &Bindings,
        role: Option<Role>,
        depth: usize,
    ) -> Option<(Rc<Deriv>, Bindings)> {
        if depth > MAX_DEPTH {
            return None;
        }
        let g = self.g;
        let cands: Vec<(usize, Vec<Option<u32>>)> = g.by_lhs[nt]
            .iter()
            .filter(|&&i| !g.productions[i].parse_only)
            .filter_map(|&i| bind_lhs(&g.productions[i], passed).map(|env| (i, env)))
            .collect();
        if cands.is_empty() {
            return None;
        }
        let (pi, mut env) = cands[self.rng.gen_range(0..cands.len())].clone();
        let p = &g.productions[pi];
        let mut children: Vec<Option<Rc<Deriv>>> = vec![None; p.rhs.len()];
        for &i in &p.expand_order {
            let sym = &p.rhs[i];
            let child_passed = resolve(&sym.feats, &env);
            let mut placed = false;
            for _ in 0..LOCAL_RETRIES {
                let Some((d, res)) = self.expand(sym, &child_passed, depth + 1) else {
                    continue;
                };
                let mut next = env.clone();
                if unify_result(sym, &res, &mut next) && constraints_hold(p, &next) {
                    env = next;
                    children[i] = Some(d);
                    placed = true;
                    break;
                }
            }
            if !placed {
                return None;
            }
        }
        let feats = resolve(&p.lhs_feats, &env);
        let node = Deriv::Node {
            nt,
            feats: feats.clone(),
            role,
            children: children.into_iter().map(|c| c.expect("all children placed")).collect(),
        };
        Some((Rc::new(node), feats))
    }
}

fn root_bindings(g: &Grammar, spec: &StructureSpec) -> Option<Bindings> {
    spec.root_features()
        .iter()
        .map(|(f, v)| Some((g.feats.get(f)?, Some(g.vals.get(v)?))))
        .collect()
}

pub(super) fn sample(g: &Grammar, spec: &StructureSpec, seed: u64) -> Result<SentenceTree, GrammarError> {
    let unrealizable = |attempts| GrammarError::Unrealizable { spec: *spec, attempts };
    let root = *g.nt_index.get("S").ok_or_else(|| unrealizable(0))?;
    let passed = root_bindings(g, spec).ok_or_else(|| unrealizable(0))?;
    for attempt in 0..MAX_ATTEMPTS {
        let mut sampler = Sampler {
            g,
            rng: ChaCha8Rng::seed_from_u64(derive_seed(&[seed, attempt as u64])),
        };
        let Some((d, _)) = sampler.expand_nt(root, &passed, None, 0) else {
            continue;
        };
        let tree = build_tree(g, &d)?;
        // Only keep sentences whose structure is recoverable from the string
        // (German case syncretism can make the gap of a relative clause
        // ambiguous).
        let tokens = tree.tokens();
        let specs = parse_specs(g, root, &tokens);
        if specs.len() == 1 && specs[0] == *spec {
            return Ok(tree);
        }
    }
    Err(unrealizable(MAX_ATTEMPTS))
}

struct Parser<'g, 't> {
    g: &'g Grammar,
    tokens: &'t [String],
}

type Parse = (usize, Rc<Deriv>, Bindings);
/// Position, variable environment and children matched so far.
type PartialParse = (usize, Vec<Option<u32>>, Vec<Rc<Deriv>>);

impl Parser<'_, '_> {
    fn parse_sym(&self, sym: &Symbol, passed: &Bindings, pos: usize, depth: usize) -> Vec<Parse> {
        if pos >= self.tokens.len() {
            return Vec::new();
        }
        let tok = &self.tokens[pos];
        match &sym.kind {
            SymKind::Literal(lit) => {
                if lit == tok {
                    vec![(
                        pos + 1,
                        Rc::new(Deriv::Leaf {
                            entry: None,
                            token: tok.clone(),
                            role: sym.role,
                        }),
                        Vec::new(),
                    )]
                } else {
                    Vec::new()
                }
            }
            SymKind::Lexical(cat) => self
                .g
                .lexicon()
                .by_surface(tok)
                .iter()
                .copied()
                .filter(|&e| self.g.lexicon().entry(e).category == *cat && self.g.entry_matches(e, passed))
                .map(|e| {
                    (
                        pos + 1,
                        Rc::new(Deriv::Leaf {
                            entry: Some(e),
                            token: tok.clone(),
                            role: sym.role,
                        }),
                        self.g.entry_bindings(e),
                    )
                })
                .collect(),
            SymKind::Nonterminal(nt) => self.parse_nt(*nt, passed, sym.role, pos, depth),
        }
    }

    fn parse_nt(&self, nt: usize, passed: &Bindings, role: Option<Role>, pos: usize, depth: usize) -> Vec<Parse> {
        let mut out = Vec::new();
        if depth > MAX_DEPTH {
            return out;
        }
        for &pi in &self.g.by_lhs[nt] {
            let p = &self.g.productions[pi];
            let Some(env) = bind_lhs(p, passed) else { continue };
            let mut states: Vec<PartialParse> = vec![(pos, env, Vec::new())];
            for sym in &p.rhs {
                let mut next = Vec::new();
                for (at, env, children) in &states {
                    let child_passed = resolve(&sym.feats, env);
                    for (end, d, res) in self.parse_sym(sym, &child_passed, *at, depth + 1) {
                        let mut env2 = env.clone();
                        if unify_result(sym, &res, &mut env2) {
                            let mut ch = children.clone();
                            ch.push(d);
                            next.push((end, env2, ch));
                        }
                    }
                }
                states = next;
                if states.is_empty() {
                    break;
                }
            }
            for (end, env, children) in states {
                let feats = resolve(&p.lhs_feats, &env);
                out.push((
                    end,
                    Rc::new(Deriv::Node {
                        nt,
                        feats: feats.clone(),
                        role,
                        children,
                    }),
                    feats,
                ));
            }
        }
        out
    }
}

fn to_strings<S: AsRef<str>>(tokens: &[S]) -> Vec<String> {
    tokens.iter().map(|t| t.as_ref().to_string()).collect()
}

fn full_parses(g: &Grammar, root: usize, tokens: &[String]) -> Vec<Rc<Deriv>> {
    let parser = Parser { g, tokens };
    parser
        .parse_nt(root, &Vec::new(), None, 0, 0)
        .into_iter()
        .filter(|(end, _, _)| *end == tokens.len())
        .map(|(_, d, _)| d)
        .collect()
}

fn deriv_spec(g: &Grammar, d: &Deriv) -> Result<StructureSpec, String> {
    let Deriv::Node { feats, .. } = d else {
        return Err("root is not a constituent".into());
    };
    StructureSpec::from_root_features(|name| {
        let f = g.feats.get(name)?;
        lookup(feats, f).map(|v| g.vals.name(v).to_string())
    })
}

/// Distinct structure specs over all full parses from `root`.
fn parse_specs(g: &Grammar, root: usize, tokens: &[String]) -> Vec<StructureSpec> {
    let mut specs: Vec<StructureSpec> = full_parses(g, root, tokens)
        .iter()
        .filter_map(|d| deriv_spec(g, d).ok())
        .collect();
    specs.sort();
    specs.dedup();
    specs
}

pub(super) fn parse_tree<S: AsRef<str>>(g: &Grammar, tokens: &[S]) -> Result<SentenceTree, GrammarError> {
    let tokens = to_strings(tokens);
    let sentence = tokens.join(" ");
    let unparseable = |reason: &str| GrammarError::Unparseable {
        sentence: sentence.clone(),
        reason: reason.to_string(),
    };
    let root = *g.nt_index.get("S").ok_or_else(|| unparseable("grammar has no S"))?;
    let parses = full_parses(g, root, &tokens);
    let first = parses
        .first()
        .ok_or_else(|| unparseable("no derivation covers the token sequence"))?;
    let spec = deriv_spec(g, first).map_err(|r| unparseable(&r))?;
    for other in &parses[1..] {
        if deriv_spec(g, other).map_err(|r| unparseable(&r))? != spec {
            return Err(GrammarError::Ambiguous { sentence });
        }
    }
    build_tree(g, first)
}

pub(super) fn parse_all<S: AsRef<str>>(g: &Grammar, tokens: &[S]) -> Result<Vec<SentenceTree>, GrammarError> {
    let tokens = to_strings(tokens);
    let root = *g.nt_index.get("S").ok_or_else(|| GrammarError::Invalid("grammar has no S".into()))?;
    let parses = full_parses(g, root, &tokens);
    if parses.is_empty() {
        return Err(GrammarError::Unparseable {
            sentence: tokens.join(" "),
            reason: "no derivation covers the token sequence".into(),
        });
    }
    let mut trees: Vec<SentenceTree> = Vec::with_capacity(parses.len());
    for d in &parses {
        let tree = build_tree(g, d)?;
        if !trees.contains(&tree) {
            trees.push(tree);
        }
    }
    Ok(trees)
}

pub(super) fn accepts<S: AsRef<str>>(g: &Grammar, root: &str, tokens: &[S]) -> bool {
    let Some(&root) = g.nt_index.get(root) else {
        return false;
    };
    !full_parses(g, root, &to_strings(tokens)).is_empty()
}

fn build_tree(g: &Grammar, d: &Deriv) -> Result<SentenceTree, GrammarError> {
    let structure = deriv_spec(g, d).map_err(|reason| GrammarError::Unparseable {
        sentence: String::new(),
        reason,
    })?;
    let mut tree = SentenceTree {
        language: g.language(),
        structure,
        nodes: Vec::new(),
        leaves: Vec::new(),
        root: 0,
        roles: Vec::new(),
    };
    flatten(g, d, &mut tree);
    Ok(tree)
}

fn flatten(g: &Grammar, d: &Deriv, tree: &mut SentenceTree) -> TreeChild {
    match d {
        Deriv::Leaf { entry, token, role } => {
            let idx = tree.leaves.len();
            tree.leaves.push(TreeLeaf {
                token: token.clone(),
                entry: entry.map(|e| g.lexicon().entry(e).clone()),
            });
            if let Some(r) = role {
                tree.roles.push((*r, idx..idx + 1));
            }
            TreeChild::Leaf(idx)
        }
        Deriv::Node {
            nt,
            feats,
            role,
            children,
        } => {
            let idx = tree.nodes.len();
            let start = tree.leaves.len();
            let mut features = FeatureBundle::default();
            let mut extra = Vec::new();
            for &(f, v) in feats {
                let Some(v) = v else { continue };
                let (name, value) = (g.feats.name(f), g.vals.name(v));
                if f == LEMMA_FEATURE || features.set(name, value).is_err() {
                    extra.push((name.to_string(), value.to_string()));
                }
            }
            tree.nodes.push(TreeNode {
                label: g.nonterminals[*nt].clone(),
                features,
                extra,
                children: Vec::new(),
                span: start..start,
                role: *role,
            });
            let kids: Vec<TreeChild> = children.iter().map(|c| flatten(g, c, tree)).collect();
            let end = tree.leaves.len();
            let node = &mut tree.nodes[idx];
            node.children = kids;
            node.span = start..end;
            if let Some(r) = role {
                tree.roles.push((*r, start..end));
            }
            TreeChild::Node(idx)
        }
    }
}
