use std::collections::{HashMap, HashSet};
use std::path::PathBuf;
use std::sync::{Arc, Mutex, MutexGuard};

use dragrepo_core::adapters::{share, Addressing, RepoSource, RepoTargets, SharedRepo};
use dragrepo_core::clock::Clock;
use dragrepo_core::engine::DragSession;
use dragrepo_core::repository::{save, RepoTree};
use dragrepo_core::{ActionSet, NodeId};

use crate::error::ApiError;

/// Sessions idle longer than this are closed.
pub const SESSION_IDLE_TIMEOUT_MS: u64 = 60_000;

pub type ServiceSession = DragSession<RepoSource, RepoTargets>;

pub struct SessionEntry {
    pub session: ServiceSession,
    pub created_at_ms: u64,
    pub last_active_ms: u64,
    pub last_event_ms: u64,
}

impl SessionEntry {
    pub fn expires_at_ms(&self) -> u64 {
        self.last_active_ms + SESSION_IDLE_TIMEOUT_MS
    }
}

#[derive(Default)]
struct Sessions {
    next: u64,
    live: HashMap<String, Arc<Mutex<SessionEntry>>>,
    expired: HashSet<String>,
}

/// Everything a request handler can reach. Cheap to clone.
#[derive(Clone)]
pub struct AppState {
    inner: Arc<Inner>,
}

struct Inner {
    repo: SharedRepo,
    dir: Option<PathBuf>,
    clock: Arc<dyn Clock>,
    sessions: Mutex<Sessions>,
    // Serializes mutate-then-save so saves land in mutation order.
    writes: Mutex<()>,
}

fn lock<T>(m: &Mutex<T>) -> MutexGuard<'_, T> {
    m.lock().unwrap_or_else(|e| e.into_inner())
}

impl AppState {
    /// Serves `tree`, saving it to `dir` after every change when a directory
    /// is given.
    pub fn new(mut tree: RepoTree, dir: Option<PathBuf>, clock: Arc<dyn Clock>) -> Self {
        tree.set_clock(clock.clone());
        AppState {
            inner: Arc::new(Inner {
                repo: share(tree),
                dir,
                clock,
                sessions: Mutex::new(Sessions::default()),
                writes: Mutex::new(()),
            }),
        }
    }

    pub fn repo(&self) -> &SharedRepo {
        &self.inner.repo
    }

    pub fn now_ms(&self) -> u64 {
        self.inner.clock.now_ms()
    }

    pub fn read<R>(&self, f: impl FnOnce(&RepoTree) -> R) -> R {
        let tree = self.inner.repo.read().unwrap_or_else(|e| e.into_inner());
        f(&tree)
    }

    /// Applies `f` to the tree and persists the result.
    pub fn write<R>(
        &self,
        f: impl FnOnce(&mut RepoTree) -> Result<R, ApiError>,
    ) -> Result<R, ApiError> {
        let _serial = lock(&self.inner.writes);
        let out = {
            let mut tree = self.inner.repo.write().unwrap_or_else(|e| e.into_inner());
            f(&mut tree)?
        };
        self.persist_locked()?;
        Ok(out)
    }

    /// Persists after a change made outside [`write`](Self::write), such as
    /// a drop.
    pub fn persist(&self) -> Result<(), ApiError> {
        let _serial = lock(&self.inner.writes);
        self.persist_locked()
    }

    fn persist_locked(&self) -> Result<(), ApiError> {
        if let Some(dir) = &self.inner.dir {
            self.read(|tree| save(tree, dir))?;
        }
        Ok(())
    }

    pub fn open_session(
        &self,
        selection: Vec<NodeId>,
        actions: ActionSet,
    ) -> (String, Arc<Mutex<SessionEntry>>) {
        let now = self.now_ms();
        let mut sessions = lock(&self.inner.sessions);
        self.sweep(&mut sessions, now);
        sessions.next += 1;
        let id = format!("s{}", sessions.next);
        let repo = self.inner.repo.clone();
        let source = RepoSource::new(repo.clone(), selection.clone(), actions);
        let targets = RepoTargets::new(repo, Addressing::Id).with_dragged(selection);
        let entry = Arc::new(Mutex::new(SessionEntry {
            // Service sessions cross a process boundary: byte streams only.
            session: DragSession::new(id.clone(), source, targets, false),
            created_at_ms: now,
            last_active_ms: now,
            last_event_ms: 0,
        }));
        sessions.live.insert(id.clone(), entry.clone());
        (id, entry)
    }

    /// Looks a session up and marks it active. Expired sessions yield
    /// `SessionClosed`; ids never issued yield 404.
    pub fn session(&self, id: &str) -> Result<Arc<Mutex<SessionEntry>>, ApiError> {
        let now = self.now_ms();
        let mut sessions = lock(&self.inner.sessions);
        self.sweep(&mut sessions, now);
        if sessions.expired.contains(id) {
            return Err(dragrepo_core::engine::EngineError::SessionClosed.into());
        }
        let entry =
            sessions.live.get(id).cloned().ok_or_else(|| {
                ApiError::not_found("UnknownSession", format!("no session {id:?}"))
            })?;
        lock(&entry).last_active_ms = now;
        Ok(entry)
    }

    pub fn live_sessions(&self) -> usize {
        let now = self.now_ms();
        let mut sessions = lock(&self.inner.sessions);
        self.sweep(&mut sessions, now);
        sessions.live.len()
    }

    fn sweep(&self, sessions: &mut Sessions, now: u64) {
        let stale: Vec<String> = sessions
            .live
            .iter()
            .filter(|(_, e)| {
                // A session busy in another request is not idle.
                e.try_lock().is_ok_and(|e| now >= e.expires_at_ms())
            })
            .map(|(id, _)| id.clone())
            .collect();
        for id in stale {
            sessions.live.remove(&id);
            sessions.expired.insert(id);
        }
    }
}

pub fn locked(entry: &Mutex<SessionEntry>) -> MutexGuard<'_, SessionEntry> {
    lock(entry)
}
