//! Maximal matching on a rooted forest of fragments.
//!
//! Leaders run Cole–Vishkin colour reduction (64-bit ids down to 6 colours),
//! then shift-down recolouring to 3 colours, then one propose/accept round
//! per colour class. Transport between leaders is abstracted by
//! [`LeaderComm`], so the same logic runs over adjacent-fragment edges and
//! over routed leader-to-leader paths.

use crate::error::Result;
use crate::node::NodeMemory;
use crate::weight::Weight;

pub trait LeaderComm<W: Weight> {
    /// Delivers every participating leader's `lead.outbox` to its forest
    /// parent (`to_children == false`) or to all its forest children.
    /// Receivers find `(sender, payload)` pairs in `lead.inbox`.
    fn mail(&mut self, states: &mut [NodeMemory<W>], to_children: bool) -> Result<()>;
}

const PROPOSE: u64 = 1;
const ACCEPT: u64 = 2;

/// One Cole–Vishkin step. `parent` is the parent's colour, which differs
/// from `color`.
pub fn cv_reduce(color: u64, parent: Option<u64>) -> u64 {
    match parent {
        None => color & 1,
        Some(pc) => {
            let k = (color ^ pc).trailing_zeros() as u64;
            2 * k + ((color >> k) & 1)
        }
    }
}

/// Colour bounds visited by repeated [`cv_reduce`] starting from 64-bit ids.
pub fn cv_schedule() -> Vec<u64> {
    let mut out = Vec::new();
    let mut bits = 64u32;
    loop {
        let b = 2 * bits as u64;
        out.push(b);
        if b <= 6 {
            return out;
        }
        bits = 64 - (b - 1).leading_zeros();
    }
}

/// Smallest colour in `{0, 1, 2}` avoiding both arguments.
pub fn free_color(a: Option<u64>, b: Option<u64>) -> u64 {
    (0..3).find(|c| Some(*c) != a && Some(*c) != b).unwrap()
}

fn participates<W>(s: &NodeMemory<W>) -> bool {
    s.leader && s.lead.active
}

fn parent_payload<W>(s: &NodeMemory<W>) -> Option<u64> {
    let p = s.lead.cv_parent?;
    s.lead
        .inbox
        .iter()
        .find(|(from, _)| *from == p)
        .map(|(_, w)| w[0])
}

fn clear_mail<W>(states: &mut [NodeMemory<W>]) {
    for s in states.iter_mut() {
        s.lead.outbox = None;
        s.lead.inbox.clear();
    }
}

fn send_colors_down<W: Weight, C: LeaderComm<W>>(comm: &mut C, states: &mut [NodeMemory<W>]) -> Result<()> {
    clear_mail(states);
    for s in states.iter_mut().filter(|s| participates(s)) {
        s.lead.outbox = Some(vec![s.lead.color]);
    }
    comm.mail(states, true)
}

/// Computes a maximal matching of the forest given by `lead.cv_parent` over
/// active leaders; the result is left in `lead.matched`.
pub fn maximal_matching<W: Weight, C: LeaderComm<W>>(comm: &mut C, states: &mut [NodeMemory<W>]) -> Result<()> {
    if !states.iter().any(|s| participates(s)) {
        return Ok(());
    }
    for s in states.iter_mut().filter(|s| participates(s)) {
        s.lead.color = s.id.0;
        s.lead.matched = None;
    }
    for _ in cv_schedule() {
        send_colors_down(comm, states)?;
        for s in states.iter_mut().filter(|s| participates(s)) {
            let pc = parent_payload(s);
            s.lead.color = cv_reduce(s.lead.color, pc);
        }
    }
    for c in [5, 4, 3] {
        send_colors_down(comm, states)?;
        let mut old = vec![0; states.len()];
        for (x, s) in states.iter_mut().enumerate() {
            if !participates(s) {
                continue;
            }
            old[x] = s.lead.color;
            s.lead.color = match (s.lead.cv_parent, parent_payload(s)) {
                (Some(_), Some(pc)) => pc,
                _ => free_color(Some(s.lead.color), None),
            };
        }
        send_colors_down(comm, states)?;
        for (x, s) in states.iter_mut().enumerate() {
            if participates(s) && s.lead.color == c {
                s.lead.color = free_color(parent_payload(s), Some(old[x]));
            }
        }
    }
    for class in 0..3 {
        clear_mail(states);
        for s in states.iter_mut().filter(|s| participates(s)) {
            if s.lead.color == class && s.lead.matched.is_none() && s.lead.cv_parent.is_some() {
                s.lead.outbox = Some(vec![PROPOSE]);
            }
        }
        comm.mail(states, false)?;
        for s in states.iter_mut() {
            s.lead.outbox = None;
        }
        for s in states.iter_mut().filter(|s| participates(s)) {
            if s.lead.matched.is_some() {
                continue;
            }
            let best = s
                .lead
                .inbox
                .iter()
                .filter(|(_, w)| w[0] == PROPOSE)
                .map(|(from, _)| *from)
                .min();
            if let Some(child) = best {
                s.lead.matched = Some(child);
                s.lead.outbox = Some(vec![ACCEPT, child]);
            }
        }
        for s in states.iter_mut() {
            s.lead.inbox.clear();
        }
        comm.mail(states, true)?;
        for s in states.iter_mut().filter(|s| participates(s)) {
            let Some(p) = s.lead.cv_parent else { continue };
            let me = s.id.0;
            if s.lead
                .inbox
                .iter()
                .any(|(from, w)| *from == p && w[0] == ACCEPT && w[1] == me)
            {
                s.lead.matched = Some(p);
            }
        }
    }
    clear_mail(states);
    Ok(())
}
