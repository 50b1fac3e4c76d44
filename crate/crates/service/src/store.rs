//! Task state, persisted as an append-only event log plus snapshots.

use std::collections::BTreeMap;
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use chainnet::{SenseRecord, WordAnnotation};
use serde::{Deserialize, Serialize};

use crate::draft::{Draft, EditError, EditOp, ValidationResponse};

pub type TaskId = u64;

const EVENTS: &str = "events.jsonl";
const SNAPSHOT: &str = "snapshot.json";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pending,
    InProgress,
    Submitted,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Revision {
    pub version: u64,
    pub annotation: WordAnnotation,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Task {
    pub id: TaskId,
    pub word: String,
    pub annotator: String,
    pub status: Status,
    pub inventory: Vec<SenseRecord>,
    pub draft: Draft,
    pub version: u64,
    #[serde(default)]
    pub submissions: Vec<Revision>,
}

impl Task {
    pub fn latest(&self) -> Option<&Revision> {
        self.submissions.last()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
enum Event {
    Assigned {
        id: TaskId,
        word: String,
        annotator: String,
        inventory: Vec<SenseRecord>,
    },
    Edited {
        id: TaskId,
        op: EditOp,
    },
    Submitted {
        id: TaskId,
        annotation: WordAnnotation,
    },
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
struct State {
    tasks: BTreeMap<TaskId, Task>,
    /// Events of the log already folded into this state.
    applied: u64,
}

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("no task {0}")]
    NotFound(TaskId),
    #[error("task {id} is at version {current}, not {expected}")]
    Conflict { id: TaskId, expected: u64, current: u64 },
    #[error(transparent)]
    Edit(#[from] EditError),
    #[error("submission rejected")]
    Rejected(Box<ValidationResponse>),
    #[error("stored annotation for `{0}` no longer validates")]
    Corrupt(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Log { path: PathBuf, line: usize, message: String },
}

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> StoreError + '_ {
    move |source| StoreError::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub enum Next {
    Task(Box<Task>),
    Done,
}

/// In-memory tasks backed by `dir`, or by nothing when `dir` is `None`.
pub struct Store {
    dir: Option<PathBuf>,
    log: Option<File>,
    state: State,
    queue: Vec<String>,
    inventory: BTreeMap<String, Vec<SenseRecord>>,
    snapshot_every: u64,
}

impl Store {
    /// `queue` is the FIFO word order; `inventory` supplies each word's senses.
    pub fn open(
        dir: Option<&Path>,
        queue: Vec<String>,
        inventory: BTreeMap<String, Vec<SenseRecord>>,
    ) -> Result<Self, StoreError> {
        let mut store = Store {
            dir: dir.map(Path::to_path_buf),
            log: None,
            state: State::default(),
            queue,
            inventory,
            snapshot_every: 100,
        };
        if let Some(dir) = dir {
            fs::create_dir_all(dir).map_err(io(dir))?;
            store.replay(dir)?;
            let path = dir.join(EVENTS);
            let file = OpenOptions::new()
                .create(true)
                .append(true)
                .open(&path)
                .map_err(io(&path))?;
            store.log = Some(file);
        }
        Ok(store)
    }

    pub fn with_snapshot_every(mut self, n: u64) -> Self {
        self.snapshot_every = n.max(1);
        self
    }

    fn replay(&mut self, dir: &Path) -> Result<(), StoreError> {
        let snap = dir.join(SNAPSHOT);
        if snap.exists() {
            let text = fs::read_to_string(&snap).map_err(io(&snap))?;
            self.state = serde_json::from_str(&text).map_err(|e| StoreError::Log {
                path: snap.clone(),
                line: e.line(),
                message: e.to_string(),
            })?;
        }
        let path = dir.join(EVENTS);
        if !path.exists() {
            return Ok(());
        }
        let reader = BufReader::new(File::open(&path).map_err(io(&path))?);
        let mut seen = 0u64;
        for (n, line) in reader.lines().enumerate() {
            let line = line.map_err(io(&path))?;
            if line.trim().is_empty() {
                continue;
            }
            seen += 1;
            if seen <= self.state.applied {
                continue;
            }
            let event: Event = serde_json::from_str(&line).map_err(|e| StoreError::Log {
                path: path.clone(),
                line: n + 1,
                message: e.to_string(),
            })?;
            self.fold(event).map_err(|e| StoreError::Log {
                path: path.clone(),
                line: n + 1,
                message: e.to_string(),
            })?;
        }
        Ok(())
    }

    fn fold(&mut self, event: Event) -> Result<(), StoreError> {
        match event {
            Event::Assigned {
                id,
                word,
                annotator,
                inventory,
            } => {
                let draft = Draft::new(word.clone(), annotator.clone(), inventory.clone());
                self.state.tasks.insert(
                    id,
                    Task {
                        id,
                        word,
                        annotator,
                        status: Status::InProgress,
                        inventory,
                        draft,
                        version: 0,
                        submissions: Vec::new(),
                    },
                );
            }
            Event::Edited { id, op } => {
                let task = self.state.tasks.get_mut(&id).ok_or(StoreError::NotFound(id))?;
                task.draft.apply(op, &task.inventory)?;
                task.version += 1;
            }
            Event::Submitted { id, annotation } => {
                let task = self.state.tasks.get_mut(&id).ok_or(StoreError::NotFound(id))?;
                task.version += 1;
                task.status = Status::Submitted;
                task.draft = Draft::from(&annotation);
                task.submissions.push(Revision {
                    version: task.version,
                    annotation,
                });
            }
        }
        self.state.applied += 1;
        Ok(())
    }

    /// Checks the event against the current state, logs it, then applies it.
    fn record(&mut self, event: Event) -> Result<(), StoreError> {
        match &event {
            Event::Assigned { .. } => {}
            Event::Edited { id, op } => {
                let task = self.task(*id).ok_or(StoreError::NotFound(*id))?;
                task.draft.clone().apply(op.clone(), &task.inventory)?;
            }
            Event::Submitted { id, .. } => {
                self.task(*id).ok_or(StoreError::NotFound(*id))?;
            }
        }
        if let (Some(file), Some(dir)) = (self.log.as_mut(), self.dir.as_ref()) {
            let path = dir.join(EVENTS);
            let mut line = serde_json::to_string(&event).expect("event serializes");
            line.push('\n');
            file.write_all(line.as_bytes()).map_err(io(&path))?;
            file.sync_data().map_err(io(&path))?;
        }
        self.fold(event)?;
        if self.state.applied % self.snapshot_every == 0 {
            self.snapshot()?;
        }
        Ok(())
    }

    pub fn snapshot(&self) -> Result<(), StoreError> {
        let Some(dir) = &self.dir else { return Ok(()) };
        let path = dir.join(SNAPSHOT);
        let tmp = dir.join(format!("{SNAPSHOT}.tmp"));
        let text = serde_json::to_string(&self.state).expect("state serializes");
        fs::write(&tmp, text).map_err(io(&tmp))?;
        fs::rename(&tmp, &path).map_err(io(&path))
    }

    pub fn task(&self, id: TaskId) -> Option<&Task> {
        self.state.tasks.get(&id)
    }

    /// The task `id`, if it belongs to `annotator`.
    pub fn owned(&self, id: TaskId, annotator: &str) -> Result<&Task, StoreError> {
        self.task(id)
            .filter(|t| t.annotator == annotator)
            .ok_or(StoreError::NotFound(id))
    }

    /// The annotator's open task, or the first queued word they have not
    /// taken yet.
    pub fn next(&mut self, annotator: &str) -> Result<Next, StoreError> {
        let mine = || self.state.tasks.values().filter(|t| t.annotator == annotator);
        if let Some(open) = mine().find(|t| t.status == Status::InProgress) {
            return Ok(Next::Task(Box::new(open.clone())));
        }
        let taken: std::collections::HashSet<&str> = mine().map(|t| t.word.as_str()).collect();
        let Some(word) = self
            .queue
            .iter()
            .find(|w| !taken.contains(w.as_str()) && self.inventory.contains_key(*w))
            .cloned()
        else {
            return Ok(Next::Done);
        };
        let id = self.state.tasks.keys().next_back().map_or(1, |k| k + 1);
        let inventory = self.inventory[&word].clone();
        self.record(Event::Assigned {
            id,
            word,
            annotator: annotator.to_string(),
            inventory,
        })?;
        Ok(Next::Task(Box::new(self.state.tasks[&id].clone())))
    }

    fn expect_version(&self, id: TaskId, annotator: &str, expected: u64) -> Result<&Task, StoreError> {
        let task = self.owned(id, annotator)?;
        if task.version != expected {
            return Err(StoreError::Conflict {
                id,
                expected,
                current: task.version,
            });
        }
        Ok(task)
    }

    pub fn edit(&mut self, id: TaskId, annotator: &str, op: EditOp, expected: u64) -> Result<&Task, StoreError> {
        self.expect_version(id, annotator, expected)?;
        self.record(Event::Edited { id, op })?;
        Ok(&self.state.tasks[&id])
    }

    /// Accepts `draft` only if it is complete and valid.
    pub fn submit(&mut self, id: TaskId, annotator: &str, mut draft: Draft, expected: u64) -> Result<&Task, StoreError> {
        let task = self.expect_version(id, annotator, expected)?;
        draft.word = task.word.clone();
        draft.annotator = task.annotator.clone();
        let report = draft.check_against(&task.inventory);
        let annotation = match draft.to_annotation() {
            Some(a) if report.complete && a.validate().is_valid() => a,
            _ => return Err(StoreError::Rejected(Box::new(report))),
        };
        self.record(Event::Submitted { id, annotation })?;
        Ok(&self.state.tasks[&id])
    }

    /// The latest submission of every task, by word then annotator.
    pub fn export(&self) -> Result<Vec<WordAnnotation>, StoreError> {
        let mut out: Vec<WordAnnotation> = self
            .state
            .tasks
            .values()
            .filter_map(|t| t.latest().map(|r| r.annotation.clone()))
            .collect();
        out.sort_by(|a, b| (&a.word, &a.annotator).cmp(&(&b.word, &b.annotator)));
        if let Some(bad) = out.iter().find(|a| !a.validate().is_valid()) {
            return Err(StoreError::Corrupt(bad.word.clone()));
        }
        Ok(out)
    }

    pub fn inventory(&self, word: &str) -> Option<&[SenseRecord]> {
        self.inventory.get(word).map(Vec::as_slice)
    }
}
