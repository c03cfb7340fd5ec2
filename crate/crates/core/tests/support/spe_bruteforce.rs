//! Subgame-perfect outcomes by direct enumeration of the game tree.
//!
//! Every node is expanded from its full history (no memo). At a node, every
//! combination of one equilibrium outcome per child is tried, and the mover
//! keeps the children that are best under that combination.

#![allow(dead_code)]

use std::collections::BTreeSet;

use cefai_core::{int, AffinePrice, Bundle, GameNode, Pixep, PreferenceOrder};
use rand::Rng;

/// Choice labels taken, then items in pick order.
pub type Play = (Vec<String>, Vec<usize>);

struct Terminal {
    play: Play,
    holdings: Vec<Bundle>,
}

fn combinations(sizes: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &s in sizes {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..s).map(move |k| {
                    let mut v = prefix.clone();
                    v.push(k);
                    v
                })
            })
            .collect();
    }
    out
}

fn dedup(v: Vec<Terminal>) -> Vec<Terminal> {
    let mut seen = BTreeSet::new();
    v.into_iter()
        .filter(|t| seen.insert(t.play.clone()))
        .collect()
}

fn leaf(pix: &Pixep, profile: &[PreferenceOrder], picks: Vec<usize>) -> Vec<Terminal> {
    let m = pix.len();
    if picks.len() == m {
        let mut holdings = vec![Bundle::EMPTY; profile.len()];
        for (k, &item) in picks.iter().enumerate() {
            let a = pix.turns()[k].agent;
            holdings[a] = holdings[a].with(item);
        }
        return vec![Terminal {
            play: (Vec::new(), picks),
            holdings,
        }];
    }
    let mover = pix.turns()[picks.len()].agent;
    let children: Vec<Vec<Terminal>> = (0..m)
        .filter(|j| !picks.contains(j))
        .map(|j| {
            let mut next = picks.clone();
            next.push(j);
            leaf(pix, profile, next)
        })
        .collect();
    let sizes: Vec<usize> = children.iter().map(Vec::len).collect();
    let pref = &profile[mover];
    let mut result = Vec::new();
    for combo in combinations(&sizes) {
        let ranks: Vec<u32> = combo
            .iter()
            .enumerate()
            .map(|(c, &k)| pref.rank(children[c][k].holdings[mover]))
            .collect();
        let best = *ranks.iter().max().unwrap();
        for (c, &k) in combo.iter().enumerate() {
            if ranks[c] == best {
                let t = &children[c][k];
                result.push(Terminal {
                    play: t.play.clone(),
                    holdings: t.holdings.clone(),
                });
            }
        }
    }
    dedup(result)
}

fn node(game: &GameNode, profile: &[PreferenceOrder]) -> Vec<Terminal> {
    match game {
        GameNode::Leaf(pix) => leaf(pix, profile, Vec::new()),
        GameNode::Choice { agent, options } => {
            let children: Vec<Vec<Terminal>> =
                options.iter().map(|(_, g)| node(g, profile)).collect();
            let sizes: Vec<usize> = children.iter().map(Vec::len).collect();
            let pref = &profile[*agent];
            let default = options.len() - 1;
            let mut result = Vec::new();
            for combo in combinations(&sizes) {
                let ranks: Vec<u32> = combo
                    .iter()
                    .enumerate()
                    .map(|(c, &k)| pref.rank(children[c][k].holdings[*agent]))
                    .collect();
                let best = *ranks.iter().max().unwrap();
                // Ties with the default go to the default.
                let chosen: Vec<usize> = if ranks[default] == best {
                    vec![default]
                } else {
                    (0..options.len()).filter(|&c| ranks[c] == best).collect()
                };
                for c in chosen {
                    let t = &children[c][combo[c]];
                    let mut path = vec![options[c].0.clone()];
                    path.extend(t.play.0.iter().cloned());
                    result.push(Terminal {
                        play: (path, t.play.1.clone()),
                        holdings: t.holdings.clone(),
                    });
                }
            }
            dedup(result)
        }
    }
}

pub fn brute_force_spe(game: &GameNode, profile: &[PreferenceOrder]) -> BTreeSet<Play> {
    node(game, profile).into_iter().map(|t| t.play).collect()
}

fn random_pixep<R: Rng>(rng: &mut R, m: usize, n: usize) -> Pixep {
    let agents: Vec<usize> = (0..m).map(|_| rng.gen_range(0..n)).collect();
    let label: String = agents.iter().map(|&a| (b'A' + a as u8) as char).collect();
    Pixep::from_pairs(
        label,
        agents
            .into_iter()
            .map(|a| (a, AffinePrice::fixed(int(1))))
            .collect(),
    )
}

/// A random pixep, or a choice (possibly nested once) among random pixeps.
pub fn random_game<R: Rng>(rng: &mut R, m: usize, n: usize) -> GameNode {
    fn build<R: Rng>(rng: &mut R, m: usize, n: usize, depth: usize) -> GameNode {
        if depth == 0 || rng.gen_bool(0.5) {
            return GameNode::Leaf(random_pixep(rng, m, n));
        }
        let k = rng.gen_range(2..=3);
        let options = (0..k)
            .map(|i| (format!("opt{i}"), build(rng, m, n, depth - 1)))
            .collect();
        GameNode::Choice {
            agent: rng.gen_range(0..n),
            options,
        }
    }
    build(rng, m, n, 2)
}
