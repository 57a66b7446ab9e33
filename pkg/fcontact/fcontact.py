from . import catalog
from .chart import sample_points
from .config import load_structure
from .deformations import ROTATION, antirotate, compose_checks, rotate, type2
from .helpers import *
from .mapping_torus import check_automorphism, check_deck_invariance, lift, slice, sliced_chart
from .pipeline import run_pipeline
from .rotation_search import solve_rotation
from .structures import Level, compare_structures, verify
from fcontact._version import __version__

import logging


class FContact:
    def __init__(self, samples=None, seed=None, tol=None, fd_check=False):
        self._configure_logging()
        self._requested = {'samples': samples, 'seed': seed, 'tol': tol}
        self.samples = get_sample_count(samples)
        self.seed = get_seed(seed)
        self.tol = get_tolerance(tol)
        self.fd_check = fd_check
        self._logger.info(f"python-fcontact {__version__}: {self.samples} samples, "
                          f"seed {self.seed}, tolerance {self.tol}")

    def _configure_logging(self):
        logging.basicConfig(level=logging.INFO)
        self._logger = logging.getLogger(__name__)

    def sample_points(self, chart):
        return sample_points(chart, self.samples, self.seed)

    def catalog_list(self):
        return catalog.list_entries()

    def catalog_get(self, name, **params):
        """
        Build a catalog structure with its companion one-forms and maps.

        parameters
        ----------
        name : string
               One of the names returned by `catalog_list`, e.g. "s-model".

        params : int keyword arguments (Optional)
                 Entry parameters such as n, s or k; omitted ones take the
                 entry defaults.
        """
        return catalog.get(name, params)

    def catalog_show(self, name, **params):
        return catalog.show(name, params)

    def structure_load(self, config):
        """
        Build a structure from a StructureConfig document.

        parameters
        ----------
        config : dict or string
                 The parsed JSON document, or the path of a JSON file.
        """
        return load_structure(config)

    def structure_verify(self, structure, level=Level.S):
        return verify(structure, level, samples=self.sample_points(structure.chart), tol=self.tol,
                      fd_check=self.fd_check)

    def structure_compare(self, first, second):
        return compare_structures(first, second, self.sample_points(first.chart))

    def deform_rotate(self, structure, A):
        return rotate(structure, A)

    def deform_antirotate(self, structure, A):
        return antirotate(structure, A)

    def deform_type2(self, structure, thetas):
        """
        Type II deformation by closed basic one-forms.

        parameters
        ----------
        structure : FStructure

        thetas : sequence of OneForm
                 One form per characteristic field. Closedness and basicness
                 are checked at the sample points; a violation raises
                 PreconditionError carrying the residual of each form.
        """
        return type2(structure, thetas, samples=self.sample_points(structure.chart), tol=self.tol)

    def deform_compose_checks(self, structure, A, thetas, kind=ROTATION):
        return compose_checks(structure, A, thetas, kind, samples=self.sample_points(structure.chart))

    def torus_lift(self, structure):
        return lift(structure)

    def torus_slice(self, structure):
        return slice(structure, samples=self.sample_points(sliced_chart(structure.chart)))

    def torus_check_deck(self, structure, phi, t0, tol=1e-10):
        return check_deck_invariance(structure, phi, t0, samples=self.sample_points(structure.chart), tol=tol)

    def automorphism_check(self, structure, phi, tol=1e-10):
        return check_automorphism(structure, phi, samples=self.sample_points(structure.chart), tol=tol)

    def rotation_search(self, target, s=None):
        """
        Find A in O(s) with h(A) = target.

        parameters
        ----------
        target : sequence of floats
                 A vector whose coordinates sum to zero.

        s : int (Optional)
            Expected length of the target.

        Raises ConvergenceError, carrying the best residual, when neither the
        start at the identity nor any seeded restart converges.
        """
        return solve_rotation(target, s=s, seed=self.seed)

    def pipeline_run(self, config):
        """
        Run a pipeline and return (records, passed). Settings given to this
        client take precedence over the pipeline's own sampling block.
        """
        return run_pipeline(config, fd_check=self.fd_check, **self._requested)
