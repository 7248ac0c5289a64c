mod common;

use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, Write};
use std::net::{TcpListener, TcpStream};
use std::sync::Arc;
use std::thread;

use dpdp::domain::JointAction;
use dpdp::env::{reset, run_episode, step};
use dpdp::scenario::{generate_preset, to_json_string};
use dpdp::server::{serve_tcp, Response, ScenarioRegistry, Session, WireMessage};
use dpdp::solvers::{nearest_act, NearestPolicy};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

struct Client {
    reader: BufReader<TcpStream>,
    writer: TcpStream,
}

impl Client {
    fn connect(addr: std::net::SocketAddr) -> Self {
        let writer = TcpStream::connect(addr).unwrap();
        Self {
            reader: BufReader::new(writer.try_clone().unwrap()),
            writer,
        }
    }

    fn call(&mut self, line: &str) -> Response {
        self.writer
            .write_all(format!("{line}\n").as_bytes())
            .unwrap();
        let mut out = String::new();
        self.reader.read_line(&mut out).unwrap();
        serde_json::from_str(&out).unwrap()
    }
}

fn step_line(action: &JointAction) -> String {
    let requests: BTreeMap<String, i64> = action
        .request_actions
        .iter()
        .map(|(m, a)| (m.to_string(), a.to_wire()))
        .collect();
    let vehicles: BTreeMap<String, usize> = action
        .vehicle_actions
        .iter()
        .map(|(k, i)| (k.to_string(), *i))
        .collect();
    serde_json::json!({"cmd": "step", "request_actions": requests, "vehicle_actions": vehicles})
        .to_string()
}

fn start_server(registry: ScenarioRegistry) -> std::net::SocketAddr {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    let registry = Arc::new(registry);
    thread::spawn(move || serve_tcp(listener, registry));
    addr
}

/// Two interleaved sessions on different scenarios each reproduce their
/// in-process episode.
#[test]
fn two_sessions_are_independent() {
    let addr = start_server(ScenarioRegistry::new());
    let setups = [("synth-S", 3u64), ("synth-S-cost", 9u64)];
    let mut clients: Vec<Client> = setups.iter().map(|_| Client::connect(addr)).collect();
    let mut states = Vec::new();
    let mut totals = [0.0; 2];
    for (c, (name, seed)) in clients.iter_mut().zip(setups) {
        let r = c.call(&format!(
            r#"{{"cmd":"reset","scenario":"{name}","seed":{seed}}}"#
        ));
        assert!(r.ok && r.t == 0);
        states.push(reset(Arc::new(generate_preset(name, seed).unwrap()), seed).unwrap());
    }
    while !states[0].is_done() {
        for i in 0..2 {
            let action = nearest_act(&states[i]);
            let r = clients[i].call(&step_line(&action));
            assert!(r.ok, "{r:?}");
            let expected = step(&states[i], &action).unwrap();
            assert_eq!(r.reward, Some(expected.reward));
            assert_eq!(r.t, expected.next_state.t());
            totals[i] += expected.reward;
            states[i] = expected.next_state;
        }
    }
    for (i, (name, seed)) in setups.iter().enumerate() {
        let reference = run_episode(
            Arc::new(generate_preset(name, *seed).unwrap()),
            &mut NearestPolicy,
            *seed,
        )
        .unwrap();
        assert_eq!(totals[i], reference.objective);
        let r = clients[i].call(r#"{"cmd":"observe"}"#);
        assert_eq!(r.done, Some(true));
        assert!(clients[i].call(r#"{"cmd":"close"}"#).ok);
    }
}

#[test]
fn lifecycle_with_registered_and_inline_scenarios() {
    let scenario = generate_preset("synth-S", 21).unwrap();
    let mut registry = ScenarioRegistry::new();
    registry.insert("day21", scenario.clone());
    let addr = start_server(registry);
    let mut client = Client::connect(addr);

    let named = client.call(r#"{"cmd":"reset","scenario":"day21","seed":0}"#);
    let file: serde_json::Value = serde_json::from_str(&to_json_string(&scenario)).unwrap();
    let inline =
        client.call(&serde_json::json!({"cmd": "reset", "scenario": file, "seed": 0}).to_string());
    assert!(
        named.ok && inline.ok,
        "{:?} {:?}",
        named.error,
        inline.error
    );
    assert_eq!(named.observation, inline.observation);

    let mut steps = 0;
    let mut r = inline;
    while r.done == Some(false) {
        let obs = r.observation.unwrap();
        let line = serde_json::json!({
            "cmd": "step",
            "request_actions": obs.masks.requests.keys().map(|m| (m.to_string(), -1)).collect::<BTreeMap<_, _>>(),
            "vehicle_actions": (0..obs.vehicles.len()).filter(|&k| obs.vehicles[k].dist == 0).map(|k| (k.to_string(), obs.vehicles[k].to)).collect::<BTreeMap<_, _>>(),
        });
        r = client.call(&line.to_string());
        assert!(r.ok, "{r:?}");
        steps += 1;
    }
    assert_eq!(steps, scenario.horizon);
    let after = client.call(r#"{"cmd":"step","request_actions":{},"vehicle_actions":{}}"#);
    assert!(!after.ok && after.t == scenario.horizon);
    assert!(client
        .call(r#"{"cmd":"reset","scenario":"nowhere","seed":0}"#)
        .error
        .unwrap()
        .contains("unknown scenario"));
}

/// Random feasible actions sent over the wire earn exactly what the
/// simulator pays in process; infeasible ones are rejected without effect.
#[test]
fn wire_rewards_match_simulator() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for episode in 0..40u64 {
        let scenario = common::random_scenario(&mut rng);
        let mut session = Session::new(Arc::new(ScenarioRegistry::new()));
        let value: serde_json::Value = serde_json::from_str(&to_json_string(&scenario)).unwrap();
        let line =
            serde_json::json!({"cmd": "reset", "scenario": value, "seed": episode}).to_string();
        assert!(session.handle_line(&line).ok);
        let mut state = reset(Arc::new(scenario), episode).unwrap();
        while !state.is_done() {
            let action = common::random_action(&state, &mut rng);
            let expected = step(&state, &action).unwrap();
            let msg = WireMessage::parse(&step_line(&action)).unwrap();
            let r = session.handle_message(msg);
            assert_eq!(r.reward, Some(expected.reward));
            assert_eq!(r.events, Some(expected.events));
            assert_eq!(session.state().unwrap(), &expected.next_state);
            state = expected.next_state;
        }
    }
}
