//! HTTP service for collecting sense-forest annotations: per-annotator word
//! queues, live draft checks, sense edits, submission and export.

pub mod api;
pub mod auth;
pub mod draft;
pub mod store;

pub use api::{router, serve, AppState};
pub use auth::Tokens;
pub use draft::{Draft, DraftSense, EditOp, ValidationResponse};
pub use store::{Store, StoreError, Task, TaskId};
