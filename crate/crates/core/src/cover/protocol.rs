use rand_distr::{Distribution, Exp};

use crate::graph::Port;
use crate::node::kind;
use crate::sim::{Message, NodeContext, NodeInfo, Protocol, Step};
use crate::weight::Weight;

/// One round of exponentially shifted region growing. Each node draws a
/// shift, wakes at `cap - floor(shift)` and, unless already captured,
/// starts its own wave. A node joins the first wave to reach it, preferring
/// the larger center id among simultaneous arrivals.
pub struct Waves {
    pub rate: f64,
    pub cap: u64,
}

#[derive(Debug, Clone, Default)]
pub struct WaveState {
    pub id: u64,
    pub start: u64,
    pub center: Option<u64>,
    pub parent: Option<Port>,
    pub children: Vec<Port>,
}

impl<W: Weight> Protocol<W> for Waves {
    type State = WaveState;

    fn init(&self, info: &NodeInfo) -> WaveState {
        WaveState {
            id: info.id.0,
            ..WaveState::default()
        }
    }

    fn step(&self, s: &mut WaveState, ctx: &mut NodeContext<'_, W>) -> Step {
        let round = ctx.round();
        if round == 0 {
            let shift = Exp::new(self.rate).map_or(0.0, |d| d.sample(ctx.rng()));
            s.start = self.cap - (shift.min(self.cap as f64).floor() as u64);
        }
        let mut best: Option<(u64, Option<Port>)> = None;
        for (p, m) in ctx.inbox() {
            match m.tag() {
                kind::JOIN => s.children.push(*p),
                kind::WAVE if s.center.is_none() => {
                    let c = m.words()[1];
                    if best.is_none_or(|b| c > b.0) {
                        best = Some((c, Some(*p)));
                    }
                }
                _ => {}
            }
        }
        if s.center.is_none() && round >= s.start && best.is_none_or(|b| s.id > b.0) {
            best = Some((s.id, None));
        }
        if s.center.is_some() {
            return Step::Halt;
        }
        let Some((c, parent)) = best else {
            return Step::WakeAt(s.start);
        };
        s.center = Some(c);
        s.parent = parent;
        if let Some(p) = parent {
            ctx.send(p, Message::new(vec![kind::JOIN]));
        }
        for p in ctx.ports().collect::<Vec<_>>() {
            if Some(p) != parent {
                ctx.send(p, Message::new(vec![kind::WAVE, c]));
            }
        }
        Step::Halt
    }
}
