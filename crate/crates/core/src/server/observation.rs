use serde::{Deserialize, Serialize};

use crate::domain::{RequestState, WorldState};
use crate::env::{action_masks, ActionMasks};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VehicleView {
    pub cap: u32,
    pub spa: u32,
    pub to: usize,
    pub dist: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RequestView {
    pub id: usize,
    pub from: usize,
    pub to: usize,
    pub val: f64,
    pub vol: u32,
    pub time: u32,
    pub state: RequestState,
    pub carrier: Option<usize>,
}

/// Everything a client may see at slice `t`. Requests that have not yet
/// appeared are absent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub t: u32,
    /// Number of requests awaiting a decision this slice.
    pub m_t: usize,
    pub horizon: u32,
    pub cost_rate: f64,
    pub distance: Vec<Vec<u32>>,
    pub vehicles: Vec<VehicleView>,
    pub requests: Vec<RequestView>,
    /// Per station: visible requests waiting there for pickup.
    pub ori: Vec<u32>,
    /// Per station: visible requests not yet delivered there, waiting or on board.
    pub dest: Vec<u32>,
    pub masks: ActionMasks,
}

pub fn observe(state: &WorldState) -> Observation {
    let scenario = state.scenario();
    let n = scenario.station_count();
    let mut ori = vec![0u32; n];
    let mut dest = vec![0u32; n];
    let mut requests = Vec::new();
    for m in state.visible_requests() {
        let r = &scenario.requests[m];
        let status = state.request_status()[m];
        match status.state {
            RequestState::Unassigned => {
                ori[r.from] += 1;
                dest[r.to] += 1;
            }
            RequestState::Picked => dest[r.to] += 1,
            RequestState::Delivered => {}
        }
        requests.push(RequestView {
            id: m,
            from: r.from,
            to: r.to,
            val: r.val,
            vol: r.vol,
            time: r.time,
            state: status.state,
            carrier: status.carrier,
        });
    }
    Observation {
        t: state.t(),
        m_t: state.decidable_requests().count(),
        horizon: scenario.horizon,
        cost_rate: scenario.cost_rate,
        distance: scenario.graph.matrix().to_vec(),
        vehicles: state
            .vehicles()
            .iter()
            .map(|v| VehicleView {
                cap: v.capacity,
                spa: v.space,
                to: v.destination,
                dist: v.remaining,
            })
            .collect(),
        requests,
        ori,
        dest,
        masks: action_masks(state),
    }
}
