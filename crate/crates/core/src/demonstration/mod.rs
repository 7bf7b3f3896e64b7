//! Demonstrations: task instances, joint trajectories reduced to guiding poses by
//! constant-screw segmentation, task templates and teachers.

mod segment;
mod teacher;
mod template;
mod types;

pub use segment::{distance_to_screw_path, guiding_indices, segment_into_screws};
pub use teacher::{DemoRequest, Heading, SimulatedTeacher, SimulatedTeacherConfig, Teacher, TeacherReply};
pub use template::{Template, BUNDLED_TEMPLATES};
pub use types::{Demonstration, TaskInstance};
