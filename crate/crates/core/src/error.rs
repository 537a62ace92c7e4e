use core::fmt;

use crate::{CornerId, EdgeId, VertexId};

/// Errors reported by the pyramid, projection and oracle layers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// A vertex id that does not exist at the requested level.
    UnknownVertex(VertexId),
    /// An edge id that does not exist in the complex or level.
    UnknownEdge(EdgeId),
    /// A corner (dual vertex) id that does not exist at the requested level.
    UnknownCorner(CornerId),
    /// A level index past the top of the pyramid.
    LevelOutOfRange { level: usize, height: usize },
    /// The requested object is not a single 4-connected component.
    NotConnected,
    /// A pixel outside the object it was supposed to belong to.
    PixelOutsideObject { x: u32, y: u32 },
    /// Two pinned anchors fall into the same object.
    DuplicateAnchor { x: u32, y: u32 },
    /// A crack that does not bound any pixel of the relevant object.
    CrackNotOnObject(EdgeId),
    /// Hole index out of range for the object.
    NoSuchHole { hole: usize, holes: usize },
    /// An edge set fails the cocycle condition at the given level.
    NotACocycle { level: usize },
    /// A RAG path that is empty, not simple, not 4-connected or leaves the object.
    MalformedPath(&'static str),
    /// A kernel schedule entry that cannot be contracted.
    InvalidSchedule(&'static str),
    /// Internal consistency check failed while building the homology level.
    Inconsistent(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::UnknownVertex(v) => write!(f, "unknown vertex {v}"),
            Error::UnknownEdge(e) => write!(f, "unknown edge {e}"),
            Error::UnknownCorner(c) => write!(f, "unknown corner {c}"),
            Error::LevelOutOfRange { level, height } => {
                write!(f, "level {level} out of range (pyramid height {height})")
            }
            Error::NotConnected => write!(f, "object is not 4-connected"),
            Error::PixelOutsideObject { x, y } => write!(f, "pixel ({x},{y}) is not in the object"),
            Error::DuplicateAnchor { x, y } => {
                write!(f, "anchor ({x},{y}) shares its object with another anchor")
            }
            Error::CrackNotOnObject(e) => write!(f, "crack {e} does not bound the object"),
            Error::NoSuchHole { hole, holes } => {
                write!(f, "hole {hole} requested but object has {holes} holes")
            }
            Error::NotACocycle { level } => write!(f, "edge set is not a cocycle at level {level}"),
            Error::MalformedPath(why) => write!(f, "malformed path: {why}"),
            Error::InvalidSchedule(why) => write!(f, "invalid kernel schedule: {why}"),
            Error::Inconsistent(why) => write!(f, "internal inconsistency: {why}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
