"""Ready-made experiment configurations."""

PRESETS = {
    "cp-hyperbolic-2balls": ("Cyclic projections onto two overlapping balls in the Poincare disk", """\
seed = 7
space.kind = poincare_disk
algorithm = cyclic_projections
sets.0.kind = ball
sets.0.center = -0.3, 0.0
sets.0.radius = 0.8
sets.1.kind = ball
sets.1.center = 0.3, 0.1
sets.1.radius = 0.8
x0 = 0.1, 0.85
stop.residual_tol = 1e-12
stop.max_iters = 100000
fixed_set = auto
"""),
    "cp-euclidean-halfplanes": ("Cyclic projections onto two halfplanes meeting at angle 0.5", """\
seed = 7
space.kind = euclidean
space.dim = 2
algorithm = cyclic_projections
# y <= 0 and y >= x tan(0.5)
sets.0.kind = halfspace
sets.0.normal = 0.0, 1.0
sets.0.offset = 0.0
sets.1.kind = halfspace
sets.1.normal = 0.479425538604203, -0.8775825618903728
sets.1.offset = 0.0
x0 = 1.0, 0.5
stop.residual_tol = 1e-12
stop.max_iters = 100000
fixed_set = 0.0, 0.0
certify = true
"""),
    "prox-split-euclidean-quadratics": ("Proximal splitting of two quadratics; limit (a + 2b) / 3", """\
seed = 7
space.kind = euclidean
space.dim = 2
algorithm = proximal_splitting
functions.0.kind = squared_distance
functions.0.point = 1.0, 0.0
functions.1.kind = squared_distance
functions.1.point = 0.0, 3.0
lams = 1.0, 1.0
x0 = 5.0, -2.0
stop.residual_tol = 1e-13
fixed_set = auto
certify = true
"""),
    "pg-euclidean-halfplane": ("Metric projected gradients for a quadratic over a halfplane", """\
seed = 7
space.kind = euclidean
space.dim = 2
algorithm = projected_gradient
function.kind = squared_distance
function.point = 2.0, 2.0
set.kind = halfspace
set.normal = 0.0, 1.0
set.offset = 0.0
lam = 1.0
tau = 0.5
x0 = -1.0, -3.0
stop.residual_tol = 1e-13
fixed_set = 2.0, 0.0
certify = true
"""),
    "cp-spherical-2balls": ("Cyclic projections onto two balls in a spherical cap", """\
seed = 7
space.kind = spherical_cap
space.kappa = 1.0
space.epsilon = 0.3
algorithm = cyclic_projections
sets.0.kind = ball
sets.0.center = 0.2, 0.0, 0.9797958971132712
sets.0.radius = 0.3
sets.1.kind = ball
sets.1.center = -0.2, 0.0, 0.9797958971132712
sets.1.radius = 0.3
x0 = 0.0, 0.5, 0.8660254037844386
stop.residual_tol = 1e-12
fixed_set = auto
"""),
    "prox-split-tree": ("Proximal splitting of squared distances to three leaves of a star tree", """\
seed = 7
space.kind = star_tree
space.edges = 1.0, 1.0, 1.0
algorithm = proximal_splitting
functions.0.kind = squared_distance
functions.0.point = 0, 1.0
functions.1.kind = squared_distance
functions.1.point = 1, 1.0
functions.2.kind = squared_distance
functions.2.point = 2, 0.5
lams = 0.5, 0.5, 0.5
x0 = 0, 0.7
stop.residual_tol = 1e-12
fixed_set = auto
"""),
    "rotation-control": ("Rotation by sqrt(2) radians: nonexpansive but not certifiable", """\
seed = 7
space.kind = euclidean
space.dim = 2
algorithm = iterate
operator.kind = rotation
operator.angle = 1.4142135623730951
x0 = 1.0, 0.0
stop.max_iters = 200
fixed_set = 0.0, 0.0
certify = true
certify_alpha = 0.5
"""),
}


def preset_text(name):
    return PRESETS[name][1]
