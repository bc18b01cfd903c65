use thiserror::Error;

/// Errors raised anywhere in the sweep pipeline.
///
/// Solver and topology failures carry enough context (stage, entity ids,
/// parameter locations) to be reported on the command line without a
/// backtrace.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum SweepError {
    #[error("time {t} outside trajectory interval [{t0}, {t1}]")]
    TimeOutOfDomain { t: f64, t0: f64, t1: f64 },
    #[error("parameter ({u}, {v}) outside patch domain")]
    DomainViolation { u: f64, v: f64 },
    #[error("degenerate tangent plane at ({u}, {v})")]
    DegenerateTangentPlane { u: f64, v: f64 },
    #[error("curve parameter {s} outside [{s0}, {s1}]")]
    ParamOutOfRange { s: f64, s0: f64, s1: f64 },
    #[error("frame degenerate: f_u^2 + f_v^2 = {norm2:e}")]
    FrameDegenerate { norm2: f64 },
    #[error("newton iteration did not converge near {location}")]
    NoConvergence { location: String },
    #[error("continuation step collapsed at {location}")]
    StepCollapse { location: String },
    #[error("vertex {vertex} has a tangential root of g near t = {t}")]
    DegenerateVertex { vertex: usize, t: f64 },
    #[error("traced endpoint {location} matches no envelope vertex")]
    EndpointMismatch { location: String },
    #[error("no sample on {entity} clears the orientation deadband")]
    OrientationUndetermined { entity: String },
    #[error("loop walk did not close: {partial}")]
    LoopNotClosed { partial: String },
    #[error("no candidate co-edge at {location}")]
    NoCandidate { location: String },
    #[error("ambiguous candidate co-edges at {location}")]
    AmbiguousCandidate { location: String },
    #[error("loop {loop_index} of face {face} belongs to no funnel component")]
    OrphanLoop { face: usize, loop_index: usize },
    #[error("unsupported envelope face topology on face {face}: {reason}")]
    UnsupportedFaceTopology { face: usize, reason: String },
    #[error("cap trim mismatch on face {face}: {reason}")]
    TrimMismatch { face: usize, reason: String },
    #[error("stitch failure: {reason}")]
    StitchFailure { reason: String },
    #[error("evaluation outside trimmed face: (q, t) = ({q}, {t})")]
    OutsideTrim { q: f64, t: f64 },
    #[error("cap triangulation failed on face {face}: {reason}")]
    TrimTriangulationFailure { face: usize, reason: String },
    #[error("vertex {vertex} is not incident to co-edge {coedge}")]
    NotIncident { coedge: usize, vertex: usize },
    #[error("sweep is not simple: {reason}")]
    NonSimpleSweepSuspected { reason: String },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("io error: {0}")]
    Io(String),
    #[error("[{stage}] {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<SweepError>,
    },
}

impl SweepError {
    pub fn at_stage(self, stage: &'static str) -> SweepError {
        match self {
            SweepError::Stage { .. } => self,
            other => SweepError::Stage { stage, source: Box::new(other) },
        }
    }

    /// Innermost error, with stage wrappers removed.
    pub fn root(&self) -> &SweepError {
        match self {
            SweepError::Stage { source, .. } => source.root(),
            other => other,
        }
    }

    pub fn is_non_simple(&self) -> bool {
        matches!(self.root(), SweepError::NonSimpleSweepSuspected { .. })
    }
}

impl From<std::io::Error> for SweepError {
    fn from(e: std::io::Error) -> Self {
        SweepError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, SweepError>;
