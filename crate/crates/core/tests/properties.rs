use std::sync::OnceLock;

use proptest::prelude::*;

use swnet::graph::{enumerate_family, FamilyFile};
use swnet::knowledge::{build_basic_ck, compute_sc, LabelUniverse};
use swnet::{accepts, CkDescription, EdgeSet, InputGraph, Limits, SwitchingNetwork, VertexSpace};

const N: usize = 6;

fn space() -> VertexSpace {
    VertexSpace::new(N).unwrap()
}

/// `G'(V, 3)` on six vertices with every label: sound and complete, since sc <= 3 there.
fn basic() -> &'static (SwitchingNetwork, CkDescription) {
    static NET: OnceLock<(SwitchingNetwork, CkDescription)> = OnceLock::new();
    NET.get_or_init(|| build_basic_ck(&space(), 3, LabelUniverse::All, &Limits::default()).unwrap())
}

fn graph_from_mask(mask: u64) -> InputGraph {
    let s = space();
    let edges = s.all_edges().into_iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, e)| e);
    InputGraph::new(s, edges).unwrap()
}

fn edge_count() -> usize {
    space().all_edges().len()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn basic_network_decides_connectivity(mask in any::<u64>()) {
        let mask = mask & ((1u64 << edge_count()) - 1);
        let g = graph_from_mask(mask);
        let accepted = accepts(&basic().0, &g).unwrap().is_some();
        prop_assert_eq!(accepted, g.has_st_path());
    }

    #[test]
    fn acceptance_is_monotone(a in any::<u64>(), b in any::<u64>()) {
        let full = (1u64 << edge_count()) - 1;
        let (lo, hi) = (a & b & full, (a | b) & full);
        let net = &basic().0;
        if accepts(net, &graph_from_mask(lo)).unwrap().is_some() {
            prop_assert!(accepts(net, &graph_from_mask(hi)).unwrap().is_some());
        }
    }

    #[test]
    fn edge_set_text_round_trips(mask in any::<u64>()) {
        let g = graph_from_mask(mask & ((1u64 << edge_count()) - 1));
        let text = g.edges().to_text();
        prop_assert_eq!(&EdgeSet::parse_text(N, &text).unwrap(), g.edges());
    }

    #[test]
    fn accepting_walks_use_present_labels(mask in any::<u64>()) {
        let g = graph_from_mask(mask & ((1u64 << edge_count()) - 1));
        let net = &basic().0;
        if let Some(walk) = accepts(net, &g).unwrap() {
            prop_assert!(walk.labels.iter().all(|l| l.consistent_with(&g)));
            prop_assert_eq!(walk.vertices.first().copied(), Some(net.s_prime()));
            prop_assert_eq!(walk.vertices.last().copied(), Some(net.t_prime()));
        }
    }
}

#[test]
fn network_text_round_trips() {
    let net = &basic().0;
    let back = SwitchingNetwork::from_text(&net.to_text()).unwrap();
    assert_eq!(&back, net);
    assert_eq!(back.to_text(), net.to_text());
}

#[test]
fn truncated_network_text_is_rejected() {
    let text = basic().0.to_text();
    let cut = &text[..text.len() / 2];
    assert!(SwitchingNetwork::from_text(cut).is_err());
}

#[test]
fn family_file_round_trips() {
    let s = VertexSpace::new(7).unwrap();
    let family = enumerate_family(&InputGraph::path(2).unwrap(), &s, true, true, &Limits::default()).unwrap();
    let file = FamilyFile::from_family("p2", &family);
    let back = FamilyFile::parse(&file.to_text()).unwrap();
    assert_eq!(back, file);
    assert_eq!(back.graphs.len(), family.len());
}

#[test]
fn sc_network_accepts_its_family() {
    let g0 = InputGraph::path(3).unwrap();
    let m = compute_sc(std::slice::from_ref(&g0), &Limits::default()).unwrap();
    let s = VertexSpace::new(7).unwrap();
    let (net, _) = build_basic_ck(&s, m, LabelUniverse::Forward, &Limits::default()).unwrap();
    let family = enumerate_family(&g0, &s, true, true, &Limits::default()).unwrap();
    for member in &family.members {
        assert!(accepts(&net, &member.graph).unwrap().is_some());
    }
}
