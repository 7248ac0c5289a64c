//! Starts the environment server on a local TCP port and plays one episode
//! through it as a client would: loaded vehicles head for a drop-off, empty
//! ones for the nearest waiting pickup.

use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, Write};
use std::net::{TcpListener, TcpStream};
use std::sync::Arc;
use std::thread;

use dpdp::domain::RequestState;
use dpdp::server::{serve_tcp, Response, ScenarioRegistry};
use serde_json::json;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let listener = TcpListener::bind("127.0.0.1:0")?;
    let addr = listener.local_addr()?;
    thread::spawn(move || serve_tcp(listener, Arc::new(ScenarioRegistry::new())));

    let stream = TcpStream::connect(addr)?;
    let mut reader = BufReader::new(stream.try_clone()?);
    let mut writer = stream;
    let mut call = |msg: serde_json::Value| -> Result<Response, Box<dyn std::error::Error>> {
        writer.write_all(format!("{msg}\n").as_bytes())?;
        let mut line = String::new();
        reader.read_line(&mut line)?;
        Ok(serde_json::from_str(&line)?)
    };

    let mut r = call(json!({"cmd": "reset", "scenario": "synth-S", "seed": 2}))?;
    let mut total = 0.0;
    while r.done == Some(false) {
        let obs = r.observation.as_ref().ok_or("missing observation")?;
        // assign each decidable request to the first vehicle the mask allows, else defer
        let mut requests = BTreeMap::new();
        let mut used = vec![0u32; obs.vehicles.len()];
        for (m, row) in &obs.masks.requests {
            let vol = obs
                .requests
                .iter()
                .find(|q| q.id == *m)
                .map_or(1, |q| q.vol);
            let pick =
                (0..obs.vehicles.len()).find(|&k| row[k] && obs.vehicles[k].spa >= used[k] + vol);
            if let Some(k) = pick {
                used[k] += vol;
            }
            requests.insert(m.to_string(), pick.map_or(-1, |k| k as i64));
        }
        let mut vehicles = BTreeMap::new();
        for (k, v) in obs.vehicles.iter().enumerate() {
            if v.dist == 0 {
                let dropoff = obs
                    .requests
                    .iter()
                    .filter(|q| q.carrier == Some(k) && q.state == RequestState::Picked)
                    .map(|q| q.to)
                    .min_by_key(|&i| obs.distance[v.to][i]);
                let pickup = (0..obs.ori.len())
                    .filter(|&i| obs.ori[i] > 0)
                    .min_by_key(|&i| obs.distance[v.to][i]);
                let target = dropoff.or(pickup).unwrap_or(v.to);
                vehicles.insert(k.to_string(), target);
            }
        }
        r = call(json!({"cmd": "step", "request_actions": requests, "vehicle_actions": vehicles}))?;
        if !r.ok {
            return Err(format!("step rejected: {:?} {:?}", r.error, r.entity).into());
        }
        total += r.reward.unwrap_or(0.0);
    }
    println!("episode finished at t={} with total reward {total}", r.t);
    call(json!({"cmd": "close"}))?;
    Ok(())
}
