"""Planar three-body dynamics with zero angular momentum on the shape sphere.

The configuration space of three point masses reduces, after translations
and rotations, to a cone over a round sphere of radius 1/2 (the moduli
space); normalizing the sphere to radius 1 gives the shape sphere carrying
the three binary-collision points, the two Lagrange points and the scaled
potential U*.  This package integrates the full Newtonian flow, its reduced
form on the cone, and the intrinsic third-order shape equation, together
with the local series, collision asymptotics, and curve-statistics tooling
built on top of them.
"""

from .masses import MassDistribution, normalize_masses
from .geometry import (TriangleState, ModuliPoint, angles_to_point,
                       point_to_angles, tangent_basis, chart_from_point,
                       project_to_shape, project_with_velocity,
                       configuration_from_shape, mutual_distances,
                       triangle_area)
from .potential import (shape_potential, shape_gradient, b_field,
                        ambient_hessian, spherical_partials, CriticalSet,
                        critical_points, hill_radius, southward_frame,
                        psi_profile)
from .newton import (Diagnostics, NewtonTrajectory, diagnostics,
                     diagnostics_along, integrate_newton,
                     make_zero_momentum_state)
from .reduced import (IrregularPointError, ModuliState, ModuliTrajectory,
                      ShapeTrajectory, cone_residuals, energy_residual,
                      hill_start, integrate_moduli, integrate_shape,
                      moduli_state_from_vectors, rho_from_alpha,
                      shape_state_from_moduli)
from .frames import (CurveFrame, PointClass, chart_frame, classify_point,
                     frame_from_vectors, intrinsic_fit, newton_frames,
                     reconstruct_rho, trajectory_frames)
from .analysis import (Extremum, FundamentalSegment, MonotonicityReport,
                       SegmentTuple, chaoticity, closed_curve_rotation,
                       east_tangent, energy_sign, fundamental_segments,
                       m_gradient, m_latitude, m_latitude_rate,
                       monotonicity_report, reflect_tuple,
                       spherical_polygon_area, state_from_tuple, tuple_at)
from .series import (CuspData, InconsistentDataError, InitialData,
                     IntrinsicData, SeriesCoefficients, cusp_data, h_min,
                     initial_data_from_intrinsics, J8, make_intrinsic,
                     measure_intrinsics, potential_series,
                     series_coefficients, series_eval, series_residuals,
                     h0_constraint_residual)
from .collision import (AsymptoticProfile, MagnifiedTrajectory, RaySolution,
                        asymptotic_profile, collision_rotation,
                        collision_time, log_time_integrate, magnified_state,
                        ray_solution)

__version__ = "0.1.0"
