//! Conductor surfaces: the triangle mesh, shape generators, file formats and
//! the per-panel geometry consumed by the boundary-element assembly.

mod io;
mod mesh;
mod panels;
mod shapes;

pub use io::{
    detect_stl_format, load_mesh, read_obj, read_stl_ascii, read_stl_binary, write_obj,
    write_stl_ascii, write_stl_binary, MeshFormat, WELD_TOLERANCE,
};
pub use mesh::{MeshError, SurfaceMesh, DEGENERATE_AREA_TOLERANCE};
pub use panels::{build_panels, Panel, PanelSystem};
pub use shapes::{make_cube, make_ellipsoid, make_icosphere, MAX_SUBDIVISIONS};
