"""Estimator-style front end for the rule graders.

The graders have no training phase, but exposing them behind the usual
fit/predict surface (with thresholds as constructor params) lets them
drop into pipelines, grid searches over thresholds, and metric tooling
that expect that contract.
"""

from __future__ import annotations

from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .attributes import AttributeSet
from .classify import SceneAnnotation, Thresholds, check_scene, classify_all


class DressAttributeClassifier(BaseEstimator):
    """Grade dress scenes into (hem length, sleeve length, hem type).

    Parameters
    ----------
    thresholds : Thresholds or None
        Decision constants. None selects the package defaults.

    Examples
    --------
    >>> clf = DressAttributeClassifier().fit([])
    >>> results = clf.predict(scenes)  # doctest: +SKIP
    """

    def __init__(self, thresholds: Thresholds | None = None):
        self.thresholds = thresholds

    def fit(self, X, y=None):
        """Validate inputs and freeze the working thresholds.

        There is nothing to estimate; fit exists for API compatibility
        and checks that X contains only SceneAnnotation values.
        """
        for scene in X:
            check_scene(scene)
        self.thresholds_ = self.thresholds if self.thresholds is not None else Thresholds()
        self.n_features_in_ = 1
        return self

    def predict(self, X) -> list[AttributeSet]:
        """Grade each scene; one AttributeSet per input, never raises per item."""
        check_is_fitted(self, "thresholds_")
        return [classify_all(check_scene(scene), self.thresholds_) for scene in X]

    def fit_predict(self, X, y=None) -> list[AttributeSet]:
        return self.fit(X, y).predict(X)
