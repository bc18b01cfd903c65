//! Numerical engines: root isolation, implicit curve tracing, funnel
//! tracing and polishing.

pub mod funnel;
pub mod roots;
pub mod trace;

pub use funnel::{refine_onto_funnel, trace_edge_funnel, trace_p_coc, CurveOwner, TracedCurve};
pub use roots::{roots_1d, Roots1d};
pub use trace::{trace_components, BoundaryRoot, Curve2, EndTag, Rect, Side, TraceOutput};
