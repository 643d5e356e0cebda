//! Random surface words and evaluation targets.

use klein::ainfty::{from_dg, AInfinityCategory, CalabiYauData};
use klein::fuzz::{random_involutive_algebra, rng};
use klein::invcat::InvolutiveCategory;
use klein::samples;
use klein::exactlin::Scalar;
use klein::surfcat::*;
use rand::seq::SliceRandom;
use rand::Rng;

pub struct Target {
    pub a: AInfinityCategory,
    pub cy: CalabiYauData,
    pub branes: usize,
}

pub fn target(c: &InvolutiveCategory, trace: klein::exactlin::SparseVector) -> Target {
    Target { a: from_dg(c).unwrap(), cy: CalabiYauData::new(trace), branes: c.branes().len() }
}

pub fn fuzzed(seed: u64) -> Target {
    let mut r = rng(seed);
    loop {
        let f = random_involutive_algebra(&mut r, 4);
        if let Some(t) = f.trace {
            return target(&f.category, t);
        }
    }
}

pub fn two_objects() -> Target {
    let s = samples::bundled().into_iter().find(|s| s.category.branes().len() == 2 && s.trace.is_some()).unwrap();
    target(&s.category, s.trace.unwrap())
}

pub fn open(slot: Slot) -> (usize, usize) {
    match slot {
        Slot::Open(s, t) => (s, t),
        Slot::Closed => unreachable!(),
    }
}

pub fn id(slots: &[Slot]) -> Option<Tree> {
    (!slots.is_empty()).then(|| Tree::Gen(Generator::Identity(ObjectLabel::new(slots.to_vec()))))
}

/// `Id ⊗ g ⊗ Id` acting on `cur[at..at + width]`.
pub fn layer(cur: &[Slot], at: usize, width: usize, g: Generator) -> Tree {
    let parts: Vec<Tree> = [id(&cur[..at]), Some(Tree::Gen(g)), id(&cur[at + width..])].into_iter().flatten().collect();
    if parts.len() == 1 {
        parts.into_iter().next().unwrap()
    } else {
        Tree::Tensor(parts)
    }
}

/// A random composite of generator layers that can be evaluated.
pub fn random_word<R: Rng>(r: &mut R, branes: usize, layers: usize) -> MorphismWord {
    let mut cur: Vec<Slot> = (0..r.gen_range(0..=2)).map(|_| Slot::Open(r.gen_range(0..branes), r.gen_range(0..branes))).collect();
    let source = cur.clone();
    let mut chain = vec![Tree::Gen(Generator::Identity(ObjectLabel::new(source.clone())))];
    for _ in 0..layers {
        let n = cur.len();
        let mut options: Vec<(usize, usize, Generator)> = Vec::new();
        for k in 0..n {
            let (s, t) = open(cur[k]);
            options.push((k, 1, Generator::TwistedDisc(s, t)));
            options.push((k, 1, Generator::DiscPlus(vec![s, t])));
            if s == t {
                options.push((k, 1, Generator::DiscAllIn(vec![s])));
            }
            if k + 1 < n {
                let (s2, t2) = open(cur[k + 1]);
                if t == s2 {
                    options.push((k, 2, Generator::DiscPlus(vec![s, t, t2])));
                    if t2 == s {
                        options.push((k, 2, Generator::DiscIn2(s, t)));
                        options.push((k, 2, Generator::DiscAllIn(vec![s, t])));
                    }
                }
                if k + 2 < n {
                    let (s3, t3) = open(cur[k + 2]);
                    if t == s2 && t2 == s3 && t3 == s {
                        options.push((k, 3, Generator::DiscAllIn(vec![s, t, t2])));
                    }
                }
            }
        }
        if n < 4 {
            for p in 0..=n {
                let l = if p > 0 { open(cur[p - 1]).1 } else if n > 0 { open(cur[0]).0 } else { r.gen_range(0..branes) };
                options.push((p, 0, Generator::DiscPlus(vec![l])));
                let (a, b) = (r.gen_range(0..branes), r.gen_range(0..branes));
                options.push((p, 0, Generator::DiscOut2(a, b)));
            }
        }
        if n >= 2 && r.gen_bool(0.25) {
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(r);
            chain.push(Tree::Permute { source: ObjectLabel::new(cur.clone()), perm: perm.clone() });
            cur = perm.iter().map(|&p| cur[p]).collect();
            continue;
        }
        // Twisting two neighbours at once sets up the reflection rule.
        if let Some(k) = (0..n.saturating_sub(1)).find(|&k| open(cur[k]).0 == open(cur[k + 1]).1) {
            if r.gen_bool(0.3) {
                let ((a, b), (c, d)) = (open(cur[k]), open(cur[k + 1]));
                let pair = Tree::Tensor(vec![Tree::Gen(Generator::TwistedDisc(a, b)), Tree::Gen(Generator::TwistedDisc(c, d))]);
                let parts: Vec<Tree> = [id(&cur[..k]), Some(pair), id(&cur[k + 2..])].into_iter().flatten().collect();
                chain.push(if parts.len() == 1 { parts.into_iter().next().unwrap() } else { Tree::Tensor(parts) });
                cur[k] = Slot::Open(b, a);
                cur[k + 1] = Slot::Open(d, c);
                continue;
            }
        }
        let Some((at, width, g)) = options.choose(r).cloned() else { break };
        let out = g.target();
        chain.push(layer(&cur, at, width, g));
        cur.splice(at..at + width, out.slots().iter().copied());
    }
    MorphismWord::from_tree(Tree::Compose(chain)).unwrap()
}

pub fn layered_word<R: Rng>(r: &mut R, branes: usize) -> MorphismWord {
    let layers = r.gen_range(1..=6);
    random_word(r, branes, layers)
}

pub fn evaluate_in(t: &Target, w: &MorphismWord) -> klein::exactlin::SparseMatrix {
    evaluate(w, &t.a, Some(&t.cy)).unwrap()
}

pub fn word(t: Tree) -> MorphismWord {
    MorphismWord::from_tree(t).unwrap()
}

pub fn gen(g: Generator) -> Tree {
    Tree::Gen(g)
}

pub fn open_id(pairs: &[(usize, usize)]) -> Tree {
    gen(Generator::Identity(ObjectLabel::open(pairs)))
}

/// One instance of each rewrite rule, with brane labels drawn from `a` and `b`.
/// The R4 instance normalizes to zero. T2 only fires when `a != b`.
pub fn rule_instances(a: usize, b: usize) -> Vec<(Rule, MorphismWord)> {
    vec![
        (Rule::R1, word(Tree::Compose(vec![gen(Generator::TwistedDisc(a, b)), gen(Generator::TwistedDisc(b, a))]))),
        (
            Rule::R2,
            word(Tree::Compose(vec![Tree::Tensor(vec![open_id(&[(a, b)]), gen(Generator::DiscPlus(vec![b]))]), gen(Generator::DiscPlus(vec![a, b, b]))])),
        ),
        (
            Rule::R2,
            word(Tree::Compose(vec![Tree::Tensor(vec![gen(Generator::DiscPlus(vec![a])), open_id(&[(a, b)])]), gen(Generator::DiscPlus(vec![a, a, b]))])),
        ),
        (
            Rule::R3,
            word(Tree::Compose(vec![
                Tree::Tensor(vec![gen(Generator::TwistedDisc(b, a)), gen(Generator::TwistedDisc(b, b))]),
                gen(Generator::DiscPlus(vec![a, b, b])),
            ])),
        ),
        (
            Rule::R4,
            word(Tree::Compose(vec![
                Tree::Tensor(vec![open_id(&[(a, b)]), gen(Generator::DiscPlus(vec![b])), open_id(&[(b, a)])]),
                gen(Generator::DiscPlus(vec![a, b, b, a])),
            ])),
        ),
        (
            Rule::T1,
            word(Tree::Compose(vec![
                Tree::Tensor(vec![open_id(&[(a, b)]), gen(Generator::DiscOut2(b, a))]),
                Tree::Tensor(vec![gen(Generator::DiscIn2(a, b)), open_id(&[(a, b)])]),
            ])),
        ),
        (
            Rule::T1,
            word(Tree::Compose(vec![
                Tree::Tensor(vec![gen(Generator::DiscOut2(a, b)), open_id(&[(a, b)])]),
                Tree::Tensor(vec![open_id(&[(a, b)]), gen(Generator::DiscIn2(b, a))]),
            ])),
        ),
        (Rule::T2, word(gen(Generator::DiscAllIn(vec![a.max(b), a.min(b), a.min(b)])))),
        (Rule::Unit, word(gen(Generator::DiscPlus(vec![a, b])))),
    ]
}

/// `D(a, …, a)` with its inputs rotated by `r`, and the sign the cyclic
/// relation predicts against the unrotated disc.
pub fn rotated_disc(a: usize, n: usize, r: usize) -> (MorphismWord, MorphismWord, Scalar) {
    let l = vec![a; n];
    let disc = word(gen(Generator::DiscAllIn(l.clone())));
    let slots = ObjectLabel::new(vec![Slot::Open(a, a); n]);
    let perm: Vec<usize> = (0..n).map(|m| (m + r) % n).collect();
    let rotated = word(Tree::Compose(vec![Tree::Permute { source: slots, perm }, gen(Generator::DiscAllIn(l))]));
    (disc, rotated, Scalar::sign((r * (n - 1)) as i64))
}
