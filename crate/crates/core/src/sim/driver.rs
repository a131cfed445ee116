use std::marker::PhantomData;

use super::{Message, NodeContext, NodeInfo, Protocol, Step};
use crate::graph::Port;
use crate::weight::Weight;

/// Event-driven node behaviour over a persistent memory type `M`.
///
/// `start` runs once in round 0; `receive` runs for every delivered message.
/// The node sleeps between messages, so a run ends once no handler sends.
pub trait Handler<W: Weight, M> {
    fn start(&self, _mem: &mut M, _ctx: &mut NodeContext<'_, W>) {}

    fn receive(&self, mem: &mut M, ctx: &mut NodeContext<'_, W>, port: Port, msg: &Message);
}

/// Adapts a [`Handler`] to the round-based [`Protocol`] interface.
pub struct Driver<H, M> {
    handler: H,
    _memory: PhantomData<fn() -> M>,
}

impl<H, M> Driver<H, M> {
    pub fn new(handler: H) -> Self {
        Driver {
            handler,
            _memory: PhantomData,
        }
    }
}

impl<W, M, H> Protocol<W> for Driver<H, M>
where
    W: Weight,
    M: From<NodeInfo>,
    H: Handler<W, M>,
{
    type State = M;

    fn init(&self, info: &NodeInfo) -> M {
        M::from(*info)
    }

    fn step(&self, mem: &mut M, ctx: &mut NodeContext<'_, W>) -> Step {
        if ctx.round() == 0 {
            self.handler.start(mem, ctx);
        }
        for i in 0..ctx.inbox().len() {
            let (port, msg) = ctx.inbox()[i].clone();
            self.handler.receive(mem, ctx, port, &msg);
        }
        Step::Halt
    }
}
