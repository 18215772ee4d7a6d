//! Acceptance checks, one line per criterion.
//!
//! Runs as a plain binary (no libtest harness) so the report lines always reach
//! the output; the process exits non-zero if any criterion fails.

use std::time::Instant;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::Pow;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use swnet::bounds::{
    audit_useful_vertex, crossover_report, exact_overlap_tail, in_first_branch, mc_useful_prob,
    overlap_probability, exact_two_sided_tail, to_f64, useful_prob_bound, BoundParams, FamilySampler, CROSSOVER_EXPONENT,
};
use swnet::constructions::{build_partition_cover, build_thm1_network, build_thm2_network, check_mimicry, Thm2Options};
use swnet::cutspace::LabelShape;
use swnet::graph::{enumerate_family, Edge, InputGraph, Limits, Vertex, VertexSet, VertexSpace};
use swnet::knowledge::{
    build_basic_ck, compute_sc, ops_components, ops_reachable, step_valid, validate_ck, KnowledgeSet, LabelUniverse,
    OpsGraph,
};
use swnet::network::{accepts, is_sound_monotone, Annotation};
use swnet::{can_transition, can_transition_bruteforce, CutFunction, Dyadic};

type F = CutFunction<Dyadic>;
type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn sp(n: usize) -> VertexSpace {
    VertexSpace::new(n).expect("valid space")
}

fn random_function(rng: &mut ChaCha8Rng, s: VertexSpace, terms: usize) -> F {
    let full = (1u64 << s.interior_count()) - 1;
    let mut f = F::zero(s);
    for _ in 0..rng.random_range(0..=terms) {
        let c = Dyadic::new(rng.random_range(-8..=8), rng.random_range(0..4));
        f.add_term(rng.random::<u64>() & full, c);
    }
    f
}

/// A difference that vanishes on every cut `label` leaves uncrossed.
fn shaped_difference(rng: &mut ChaCha8Rng, s: VertexSpace, label: Edge) -> F {
    let seed = random_function(rng, s, 4);
    let mut d = F::zero(s);
    for (m, c) in seed.terms() {
        let c = *c;
        match LabelShape::of(label) {
            LabelShape::SourceSink => d.add_term(m, c),
            LabelShape::Never => {}
            LabelShape::FromSource(b) => {
                let base = m & !(1 << b);
                d.add_term(base, c);
                d.add_term(base | 1 << b, c);
            }
            LabelShape::ToSink(a) => {
                let base = m & !(1 << a);
                d.add_term(base, c);
                d.add_term(base | 1 << a, -c);
            }
            LabelShape::Interior(a, b) => {
                let base = m & !(1 << a | 1 << b);
                d.add_term(base, c);
                d.add_term(base | 1 << a, -c);
                d.add_term(base | 1 << b, c);
                d.add_term(base | 1 << a | 1 << b, -c);
            }
        }
    }
    d
}

fn label_of_shape(rng: &mut ChaCha8Rng, s: VertexSpace, shape: usize) -> Edge {
    let interior = s.interior_count();
    let v = |i: usize| Vertex::interior(i);
    match shape {
        0 => Edge::ST,
        1 => Edge::new(Vertex::S, v(rng.random_range(0..interior))),
        2 => Edge::new(v(rng.random_range(0..interior)), Vertex::T),
        3 => {
            let a = rng.random_range(0..interior);
            let b = (a + rng.random_range(1..interior)) % interior;
            Edge::new(v(a), v(b))
        }
        _ => match rng.random_range(0..3) {
            0 => Edge::new(Vertex::T, v(rng.random_range(0..interior))),
            1 => Edge::new(v(rng.random_range(0..interior)), Vertex::S),
            _ => Edge::new(Vertex::T, Vertex::S),
        },
    }
}

fn criterion_1() -> Outcome {
    let limits = Limits::default();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for i in 0..1000 {
        let s = sp(rng.random_range(3..=8));
        let f = random_function(&mut rng, s, 8);
        let g = random_function(&mut rng, s, 8);
        let fast = f.dot(&g).map_err(|e| e.to_string())?;
        let slow = f.dot_by_enumeration(&g, &limits).map_err(|e| e.to_string())?;
        check(fast == slow, || format!("dot mismatch on pair {i}: {fast} vs {slow}"))?;
    }
    let names = ["s->t", "s->v", "v->t", "v->w", "no-cross"];
    let mut counts = Vec::new();
    for (shape, name) in names.iter().enumerate() {
        let mut valid = 0;
        for i in 0..1000 {
            let s = sp(rng.random_range(4..=8));
            let label = label_of_shape(&mut rng, s, shape);
            let f = random_function(&mut rng, s, 8);
            let g = match i % 4 {
                0 => random_function(&mut rng, s, 8),
                1 => &(&f + &shaped_difference(&mut rng, s, label)) + &random_function(&mut rng, s, 1),
                _ => &f + &shaped_difference(&mut rng, s, label),
            };
            let fast = can_transition(&f, &g, label).map_err(|e| e.to_string())?;
            let slow = can_transition_bruteforce(&f, &g, label, &limits).map_err(|e| e.to_string())?;
            check(fast == slow, || format!("{name} triple {i}: fast {fast}, enumeration {slow}"))?;
            valid += usize::from(fast);
        }
        check(valid > 0 && (shape == 0 || valid < 1000), || format!("{name}: degenerate sample ({valid} valid)"))?;
        counts.push(format!("{name} {valid}/1000"));
    }
    Ok(format!("1000 dot pairs exact; transitions agree ({})", counts.join(", ")))
}

fn raw_sets(s: &VertexSpace) -> Vec<KnowledgeSet> {
    let edges = s.all_edges();
    (0u64..1 << edges.len())
        .map(|st| KnowledgeSet::from_edges(s, edges.iter().enumerate().filter(|(i, _)| st >> i & 1 == 1).map(|(_, &e)| e)))
        .collect()
}

fn criterion_2() -> Outcome {
    let small = sp(4);
    let sets = raw_sets(&small);
    for k in &sets {
        k.closure();
    }
    let mut pairs = 0u64;
    for &label in &small.all_edges() {
        let graph = OpsGraph::new(&small, label).map_err(|e| e.to_string())?;
        let comp = ops_components(&small, label, 1 << 22).map_err(|e| e.to_string())?;
        let comp_of = |k: &KnowledgeSet| comp[graph.encode(k.edges()) as usize];
        for a in &sets {
            let ca = comp_of(a);
            for b in &sets {
                pairs += 1;
                if step_valid(a, b, label) != (ca == comp_of(b)) {
                    return Err(format!("mismatch for {} / {} with {label}", a.edges().to_text(), b.edges().to_text()));
                }
            }
        }
        // the component labelling and the search agree
        let mut rng = ChaCha8Rng::seed_from_u64(label.from.id() as u64 * 8 + label.to.id() as u64);
        for _ in 0..64 {
            let (a, b) = (&sets[rng.random_range(0..sets.len())], &sets[rng.random_range(0..sets.len())]);
            let r = ops_reachable(a, b, label, 1 << 20).map_err(|e| e.to_string())?;
            check(r.is_reachable() == (comp_of(a) == comp_of(b)), || "search disagrees with components".into())?;
        }
    }
    let mid = sp(5);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let edges = mid.all_edges();
    let mut sampled = 0;
    let mut equivalent = 0;
    for &label in mid.forward_edges().iter().step_by(3) {
        let graph = OpsGraph::new(&mid, label).map_err(|e| e.to_string())?;
        let comp = ops_components(&mid, label, 1 << 22).map_err(|e| e.to_string())?;
        for i in 0..4000 {
            let bits_a = rng.random::<u64>() & ((1 << edges.len()) - 1);
            let mut bits_b = rng.random::<u64>() & ((1 << edges.len()) - 1);
            if i % 2 == 0 {
                // a short random walk keeps roughly half the pairs related
                bits_b = bits_a;
                for _ in 0..rng.random_range(1..12) {
                    let moves = graph.moves(bits_b);
                    bits_b = moves[rng.random_range(0..moves.len())];
                }
            }
            let a = KnowledgeSet::new(graph.decode(bits_a));
            let b = KnowledgeSet::new(graph.decode(bits_b));
            let same = comp[bits_a as usize] == comp[bits_b as usize];
            check(step_valid(&a, &b, label) == same, || format!("sampled mismatch at interior 3 with {label}"))?;
            sampled += 1;
            equivalent += usize::from(same);
        }
    }
    Ok(format!("{pairs} exhaustive (pair, label) cases at interior 2; {sampled} sampled at interior 3 ({equivalent} equivalent)"))
}

fn criterion_3() -> Outcome {
    let limits = Limits::default();
    let mut got = Vec::new();
    for k in 1..=8usize {
        let sc = compute_sc(&[InputGraph::path(k).map_err(|e| e.to_string())?], &limits).map_err(|e| e.to_string())?;
        let want = k.ilog2() as usize + 1;
        check(sc == want, || format!("k = {k}: sc = {sc}, expected {want}"))?;
        got.push(sc.to_string());
    }
    Ok(format!("sc for k = 1..8: {}", got.join(" ")))
}

fn criterion_4() -> Outcome {
    let limits = Limits::default();
    let mut rows = Vec::new();
    for (k, n) in [(1, 8), (2, 8), (2, 12), (3, 10)] {
        let s = sp(n);
        let b = build_thm1_network(s, k, 7, &limits).map_err(|e| e.to_string())?;
        let family = enumerate_family(&InputGraph::path(k).unwrap(), &s, true, false, &limits).map_err(|e| e.to_string())?;
        for m in &family.members {
            check(accepts(&b.network, &m.graph).map_err(|e| e.to_string())?.is_some(), || {
                format!("(k={k}, N={n}) rejects a member")
            })?;
        }
        check(validate_ck(&b.network, &b.description).map_err(|e| e.to_string())?.is_none(), || {
            format!("(k={k}, N={n}) description invalid")
        })?;
        check(is_sound_monotone(&b.network, &limits).map_err(|e| e.to_string())?.is_none(), || {
            format!("(k={k}, N={n}) unsound")
        })?;
        check(b.size() as u128 <= b.bound, || format!("(k={k}, N={n}) size {} > {}", b.size(), b.bound))?;
        rows.push(format!("(k={k},N={n}) {} members, size {} <= {}", family.len(), b.size(), b.bound));
    }
    Ok(rows.join("; "))
}

fn criterion_5() -> Outcome {
    let limits = Limits::default();
    let mut rows = Vec::new();
    for (k, n, m) in [(1, 5, 1), (2, 8, 2)] {
        let s = sp(n);
        let g0 = InputGraph::path(k).unwrap();
        let b = build_thm2_network(std::slice::from_ref(&g0), s, &Thm2Options { seed: 5, ..Thm2Options::default() })
            .map_err(|e| e.to_string())?;
        check(b.m == m, || format!("(k={k}, N={n}) m = {}, expected {m}", b.m))?;
        check(is_sound_monotone(&b.network, &limits).map_err(|e| e.to_string())?.is_none(), || {
            format!("(k={k}, N={n}) unsound")
        })?;
        let family = enumerate_family(&g0, &s, true, true, &limits).map_err(|e| e.to_string())?;
        for mem in &family.members {
            check(accepts(&b.network, &mem.graph).map_err(|e| e.to_string())?.is_some(), || {
                format!("(k={k}, N={n}) rejects a member")
            })?;
        }
        let function = |v: u32| match b.network.annotation(v as usize) {
            Some(Annotation::Fourier(f)) => Ok(f),
            _ => Err("vertex without a function".to_string()),
        };
        for e in b.network.edges() {
            let ok = can_transition(function(e.a)?, function(e.b)?, e.label.edge).map_err(|e| e.to_string())?;
            check(ok, || format!("edge {} {} {} fails the transition test", e.a, e.b, e.label))?;
        }
        check(BigUint::from(b.size()) <= b.bound, || format!("size {} > {}", b.size(), b.bound))?;
        rows.push(format!(
            "(k={k},N={n},m={m}) {} members, {} edges checked, |H| = {} <= {}",
            family.len(),
            b.network.edges().len(),
            b.size(),
            b.bound
        ));
    }
    Ok(rows.join("; "))
}

fn criterion_6() -> Outcome {
    let limits = Limits::default();
    let s = sp(8);
    let g0 = InputGraph::path(2).unwrap();
    let build = build_thm2_network(std::slice::from_ref(&g0), s, &Thm2Options { seed: 5, ..Thm2Options::default() })
        .map_err(|e| e.to_string())?;
    let family = enumerate_family(&g0, &s, true, true, &limits).map_err(|e| e.to_string())?;
    let r = check_mimicry(&build, &g0, &family.members, &limits).map_err(|e| e.to_string())?;
    check(r.ok(), || format!("{} failures, e.g. {:?}", r.failures, r.examples.first()))?;
    Ok(format!(
        "{} members x {} steps: {} splices, {} links realized",
        r.members, r.steps, r.splices, r.links
    ))
}

fn criterion_7() -> Outcome {
    for n in 4..=12usize {
        let interior = n - 2;
        for k in 0..=interior {
            let subsets: Vec<VertexSet> = VertexSet::full(interior).subsets().filter(|v| v.len() == k).collect();
            for x in 0..=interior {
                let fixed = VertexSet((1u64 << x) - 1);
                for m in 0..=k + 1 {
                    let hits = subsets.iter().filter(|v| v.intersection(fixed).len() >= m).count();
                    let want = BigRational::new(hits.into(), subsets.len().into());
                    let got = exact_overlap_tail(x, k, m, n).map_err(|e| e.to_string())?;
                    check(got == want, || format!("tail mismatch at n={n} k={k} x={x} m={m}"))?;
                }
            }
        }
    }
    let (k, m) = (2usize, 2usize);
    let mut notes = Vec::new();
    for n in [40usize, 64, 128] {
        let p = BoundParams::new(n, k, m).map_err(|e| e.to_string())?;
        let bound = useful_prob_bound(p).map_err(|e| e.to_string())?;
        let mut branch = 0;
        for x in 0..n - 2 {
            if !in_first_branch(x, p) {
                let tail = exact_overlap_tail(x, k, m, n).map_err(|e| e.to_string())?;
                check(tail <= bound, || format!("N={n} x={x}: tail exceeds the bound"))?;
                branch = x;
            }
            if n > x + k + 2 {
                let r = BigRational::new((x * k).into(), (n - x - k - 2).into());
                for y in 0..=x.min(k) {
                    let py = overlap_probability(x, y, k, n).map_err(|e| e.to_string())?;
                    check(py <= Pow::pow(&r, y as u32), || format!("N={n} x={x} y={y}: p(y) too large"))?;
                }
            }
        }
        let mut note = format!("N={n}: bound {:.4}, branch x <= {branch}", to_f64(&bound));
        // knowledge sets live on at most 64 vertices, so sampling stops at N = 64
        if n > 64 {
            notes.push(note + ", exact only");
            continue;
        }
        let s = sp(n);
        let x = 6;
        let k_set = KnowledgeSet::from_vertex_set(&s, VertexSet((1 << x) - 1));
        let one_sided = FamilySampler { interior: n - 2, k, allow_right: false };
        let est = mc_useful_prob(&k_set, one_sided, m, 100_000, n as u64).map_err(|e| e.to_string())?;
        let exact = to_f64(&exact_overlap_tail(x, k, m, n).map_err(|e| e.to_string())?);
        check(est.agrees_with(exact, 3.0), || format!("N={n}: MC {} +- {} vs exact {exact}", est.mean, est.stderr))?;
        let two_sided = FamilySampler { interior: n - 2, k, allow_right: true };
        let est2 = mc_useful_prob(&k_set, two_sided, m, 100_000, n as u64 + 1).map_err(|e| e.to_string())?;
        let exact2 = to_f64(&exact_two_sided_tail(x, k, m, n).map_err(|e| e.to_string())?);
        check(est2.agrees_with(exact2, 3.0), || format!("N={n}: two-sided MC {} vs {exact2}", est2.mean))?;
        note += &format!(", MC {:.5}+-{:.5} vs {:.5}", est.mean, est.stderr, exact);
        notes.push(note);
    }
    Ok(format!("enumeration equality for n <= 12; {}", notes.join("; ")))
}

fn criterion_8() -> Outcome {
    let limits = Limits::default();
    let s = sp(8);
    let g0 = InputGraph::path(2).unwrap();
    let family = enumerate_family(&g0, &s, true, true, &limits).map_err(|e| e.to_string())?;
    let thm1 = build_thm1_network(s, 2, 7, &limits).map_err(|e| e.to_string())?;
    let (basic, basic_d) = build_basic_ck(&s, 2, LabelUniverse::Forward, &limits).map_err(|e| e.to_string())?;
    let mut audited = [0usize; 2];
    for (slot, (net, d)) in [(&thm1.network, &thm1.description), (&basic, &basic_d)].into_iter().enumerate() {
        for mem in &family.members {
            if accepts(net, &mem.graph).map_err(|e| e.to_string())?.is_none() {
                continue;
            }
            let ok = audit_useful_vertex(net, d, mem, 2).map_err(|e| e.to_string())?;
            check(ok, || format!("member v0={:?} L={:#b} bypasses every useful vertex", mem.v0, mem.left.bits()))?;
            audited[slot] += 1;
        }
    }
    check(audited[0] >= 120 && audited[1] >= 120, || format!("too few accepted members: {audited:?}"))?;
    Ok(format!("audited {} ordering-network members and {} G'(V,2) members", audited[0], audited[1]))
}

fn criterion_9() -> Outcome {
    let lgs: Vec<u32> = (16..=64).collect();
    let report = crossover_report(&lgs).map_err(|e| e.to_string())?;
    print!("{}", report.to_table());
    let failures = report.check();
    check(failures.is_empty(), || failures.join("; "))?;
    let (first, last) = (&report.rows[0], &report.rows[report.rows.len() - 1]);
    Ok(format!(
        "upper exponent max {:.3} < c = {CROSSOVER_EXPONENT}; m grows {} -> {}, lower exponent {:.3} -> {:.3}",
        report.max_upper_exponent(),
        first.m,
        last.m,
        first.lower_exponent(),
        last.lower_exponent()
    ))
}

fn artifacts() -> Vec<String> {
    let limits = Limits::default();
    let s = sp(8);
    let g0 = InputGraph::path(2).unwrap();
    let thm1 = build_thm1_network(s, 2, 3, &limits).unwrap();
    let thm2 = build_thm2_network(&[g0], s, &Thm2Options { seed: 3, ..Thm2Options::default() }).unwrap();
    let cover = build_partition_cover(sp(10), 3, 2, 3, &limits).unwrap();
    let est = mc_useful_prob(
        &KnowledgeSet::from_vertex_set(&sp(20), VertexSet(0b1111)),
        FamilySampler { interior: 18, k: 2, allow_right: true },
        2,
        50_000,
        3,
    )
    .unwrap();
    vec![
        thm1.network.to_text(),
        thm2.network.to_text(),
        thm2.manifest(),
        format!("{:?}", cover.partitions),
        format!("{:?}", est),
        crossover_report(&[16, 25, 36]).unwrap().to_tsv(),
    ]
}

fn criterion_10() -> Outcome {
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .expect("thread pool")
            .install(artifacts)
    };
    let reference = run(1);
    for threads in [1, 4, 4] {
        let again = run(threads);
        for (i, (a, b)) in reference.iter().zip(&again).enumerate() {
            check(a == b, || format!("artifact {i} differs with {threads} worker(s)"))?;
        }
    }
    let bytes: usize = reference.iter().map(String::len).sum();
    Ok(format!("{} artifacts ({bytes} bytes) identical across 1 and 4 workers", reference.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("basis and transition oracles", criterion_1),
        ("knowledge step equivalence", criterion_2),
        ("sc of paths", criterion_3),
        ("ordering network", criterion_4),
        ("Fourier network", criterion_5),
        ("mimicry", criterion_6),
        ("overlap probabilities", criterion_7),
        ("useful-vertex audit", criterion_8),
        ("crossover", criterion_9),
        ("determinism", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS [{secs:.1}s] {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL [{secs:.1}s] {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
