//! Line-delimited JSON protocol exposing reset/observe/step to external
//! clients, over stdio or TCP. Each connection is one session running one
//! episode at a time.

mod observation;

pub use observation::{observe, Observation, RequestView, VehicleView};

use std::collections::BTreeMap;
use std::io::{self, BufRead, BufReader, Write};
use std::net::{TcpListener, TcpStream};
use std::sync::Arc;
use std::thread;

use log::{info, warn};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::domain::{JointAction, RequestAction, Scenario, WorldState};
use crate::env::{reset, step_in_place, Entity, EnvError, Event};
use crate::scenario::{from_json_value, generate_preset};

/// Named scenarios available to `reset`. Names not registered fall back to
/// the synthetic presets, generated with the reset seed.
#[derive(Debug, Clone, Default)]
pub struct ScenarioRegistry {
    named: BTreeMap<String, Arc<Scenario>>,
}

impl ScenarioRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, name: impl Into<String>, scenario: Scenario) {
        self.named.insert(name.into(), Arc::new(scenario));
    }

    pub fn resolve(&self, name: &str, seed: u64) -> Option<Arc<Scenario>> {
        self.named
            .get(name)
            .cloned()
            .or_else(|| generate_preset(name, seed).map(Arc::new))
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum ScenarioRef {
    Name(String),
    Inline(Value),
}

#[derive(Debug, Clone, PartialEq)]
pub enum WireMessage {
    Reset {
        scenario: ScenarioRef,
        seed: u64,
    },
    Observe,
    Step {
        request_actions: BTreeMap<usize, i64>,
        vehicle_actions: BTreeMap<usize, usize>,
    },
    Close,
}

#[derive(Debug, Clone, PartialEq)]
pub enum WireError {
    /// Not JSON, or fields of the wrong shape.
    Parse(String),
    UnknownCommand(String),
}

#[derive(Deserialize)]
struct ResetBody {
    scenario: ScenarioRef,
    #[serde(default)]
    seed: u64,
}

#[derive(Deserialize)]
struct StepBody {
    #[serde(default)]
    request_actions: BTreeMap<usize, i64>,
    #[serde(default)]
    vehicle_actions: BTreeMap<usize, usize>,
}

impl WireMessage {
    /// Decodes one message. Fields other than the ones a command uses are ignored.
    pub fn parse(line: &str) -> Result<Self, WireError> {
        let value: Value =
            serde_json::from_str(line).map_err(|e| WireError::Parse(e.to_string()))?;
        let cmd = value
            .get("cmd")
            .and_then(Value::as_str)
            .ok_or_else(|| WireError::Parse("missing `cmd`".into()))?;
        let parse = |e: serde_json::Error| WireError::Parse(e.to_string());
        match cmd {
            "reset" => {
                let b: ResetBody = serde_json::from_value(value).map_err(parse)?;
                Ok(WireMessage::Reset {
                    scenario: b.scenario,
                    seed: b.seed,
                })
            }
            "observe" => Ok(WireMessage::Observe),
            "step" => {
                let b: StepBody = serde_json::from_value(value).map_err(parse)?;
                Ok(WireMessage::Step {
                    request_actions: b.request_actions,
                    vehicle_actions: b.vehicle_actions,
                })
            }
            "close" => Ok(WireMessage::Close),
            other => Err(WireError::UnknownCommand(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Response {
    pub ok: bool,
    pub t: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reward: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub done: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub observation: Option<Observation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub events: Option<Vec<Event>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entity: Option<Entity>,
}

impl Response {
    fn ok(t: u32) -> Self {
        Self {
            ok: true,
            t,
            reward: None,
            done: None,
            observation: None,
            events: None,
            error: None,
            detail: None,
            entity: None,
        }
    }

    fn error(t: u32, error: impl Into<String>) -> Self {
        Self {
            ok: false,
            error: Some(error.into()),
            ..Self::ok(t)
        }
    }
}

/// One client's episode.
pub struct Session {
    registry: Arc<ScenarioRegistry>,
    state: Option<WorldState>,
    closed: bool,
}

impl Session {
    pub fn new(registry: Arc<ScenarioRegistry>) -> Self {
        Self {
            registry,
            state: None,
            closed: false,
        }
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn state(&self) -> Option<&WorldState> {
        self.state.as_ref()
    }

    fn t(&self) -> u32 {
        self.state.as_ref().map_or(0, WorldState::t)
    }

    /// Parses one line and answers it. Malformed input gets `error: "parse"`.
    pub fn handle_line(&mut self, line: &str) -> Response {
        match WireMessage::parse(line) {
            Ok(msg) => self.handle_message(msg),
            Err(WireError::Parse(detail)) => Response {
                detail: Some(detail),
                ..Response::error(self.t(), "parse")
            },
            Err(WireError::UnknownCommand(cmd)) => {
                Response::error(self.t(), format!("unknown command `{cmd}`"))
            }
        }
    }

    pub fn handle_message(&mut self, msg: WireMessage) -> Response {
        match msg {
            WireMessage::Reset { scenario, seed } => self.reset(scenario, seed),
            WireMessage::Observe => match &self.state {
                Some(s) => Response {
                    observation: Some(observe(s)),
                    done: Some(s.is_done()),
                    ..Response::ok(s.t())
                },
                None => Response::error(0, "no episode: send reset first"),
            },
            WireMessage::Step {
                request_actions,
                vehicle_actions,
            } => self.step(request_actions, vehicle_actions),
            WireMessage::Close => {
                self.closed = true;
                Response::ok(self.t())
            }
        }
    }

    fn reset(&mut self, scenario: ScenarioRef, seed: u64) -> Response {
        let t = self.t();
        let scenario = match scenario {
            ScenarioRef::Name(name) => match self.registry.resolve(&name, seed) {
                Some(s) => s,
                None => return Response::error(t, format!("unknown scenario `{name}`")),
            },
            ScenarioRef::Inline(value) => match from_json_value(value) {
                Ok(s) => Arc::new(s),
                Err(e) => return Response::error(t, format!("scenario: {e}")),
            },
        };
        match reset(scenario, seed) {
            Ok(state) => {
                let response = Response {
                    observation: Some(observe(&state)),
                    done: Some(state.is_done()),
                    ..Response::ok(0)
                };
                self.state = Some(state);
                response
            }
            Err(e) => Response::error(t, e.to_string()),
        }
    }

    fn step(
        &mut self,
        request_actions: BTreeMap<usize, i64>,
        vehicle_actions: BTreeMap<usize, usize>,
    ) -> Response {
        let Some(state) = self.state.as_mut() else {
            return Response::error(0, "no episode: send reset first");
        };
        let t = state.t();
        if state.is_done() {
            return Response::error(t, EnvError::Finished(t).to_string());
        }
        let mut decoded = BTreeMap::new();
        for (m, code) in request_actions {
            match RequestAction::from_wire(code) {
                Some(a) => {
                    decoded.insert(m, a);
                }
                None => {
                    return Response {
                        entity: Some(Entity::Request(m)),
                        ..Response::error(t, format!("invalid action code {code} for request {m}"))
                    }
                }
            }
        }
        let action = JointAction {
            request_actions: decoded,
            vehicle_actions,
        };
        match step_in_place(state, &action) {
            Ok((reward, events, _)) => Response {
                reward: Some(reward),
                done: Some(state.is_done()),
                observation: Some(observe(state)),
                events: Some(events),
                ..Response::ok(state.t())
            },
            Err(e) => Response {
                entity: e.offending_entity(),
                ..Response::error(t, e.to_string())
            },
        }
    }
}

/// Reads requests line by line and writes one response line each, until
/// `close` or end of input.
pub fn serve_stream<R: BufRead, W: Write>(
    reader: R,
    mut writer: W,
    registry: Arc<ScenarioRegistry>,
) -> io::Result<()> {
    let mut session = Session::new(registry);
    for line in reader.lines() {
        let line = match line {
            Ok(l) => l,
            Err(e) => {
                // best effort: tell the client before giving up
                let _ = writer.write_all(
                    to_line(&Response::error(session.t(), format!("transport: {e}"))).as_bytes(),
                );
                return Err(e);
            }
        };
        if line.trim().is_empty() {
            continue;
        }
        let response = session.handle_line(&line);
        writer.write_all(to_line(&response).as_bytes())?;
        writer.flush()?;
        if session.is_closed() {
            break;
        }
    }
    Ok(())
}

/// One response as a newline-terminated line, written in a single call.
fn to_line(response: &Response) -> String {
    let mut line = serde_json::to_string(response).expect("responses serialize");
    line.push('\n');
    line
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Transport {
    Stdio,
    Tcp(String),
}

impl std::str::FromStr for Transport {
    type Err = String;

    /// `stdio`, `tcp:PORT` (loopback) or `tcp:HOST:PORT`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "stdio" {
            return Ok(Transport::Stdio);
        }
        let rest = s
            .strip_prefix("tcp:")
            .ok_or_else(|| format!("unknown transport `{s}`"))?;
        if rest.parse::<u16>().is_ok() {
            Ok(Transport::Tcp(format!("127.0.0.1:{rest}")))
        } else if rest
            .rsplit_once(':')
            .is_some_and(|(_, p)| p.parse::<u16>().is_ok())
        {
            Ok(Transport::Tcp(rest.to_string()))
        } else {
            Err(format!("bad tcp endpoint `{rest}`"))
        }
    }
}

/// Accepts connections forever, one thread and one session per connection.
pub fn serve_tcp(listener: TcpListener, registry: Arc<ScenarioRegistry>) -> io::Result<()> {
    for stream in listener.incoming() {
        let stream = stream?;
        let registry = registry.clone();
        thread::spawn(move || {
            let peer = stream
                .peer_addr()
                .map(|a| a.to_string())
                .unwrap_or_default();
            info!("session opened: {peer}");
            if let Err(e) = serve_connection(stream, registry) {
                warn!("session {peer} ended: {e}");
            }
        });
    }
    Ok(())
}

fn serve_connection(stream: TcpStream, registry: Arc<ScenarioRegistry>) -> io::Result<()> {
    // one small line per reply; don't hold it back waiting for an ack
    stream.set_nodelay(true)?;
    let reader = BufReader::new(stream.try_clone()?);
    serve_stream(reader, stream, registry)
}

pub fn serve(transport: &Transport, registry: Arc<ScenarioRegistry>) -> io::Result<()> {
    match transport {
        Transport::Stdio => serve_stream(io::stdin().lock(), io::stdout().lock(), registry),
        Transport::Tcp(addr) => {
            let listener = TcpListener::bind(addr)?;
            info!("listening on {}", listener.local_addr()?);
            serve_tcp(listener, registry)
        }
    }
}
