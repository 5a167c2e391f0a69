"""Monte Carlo trends on synthetic populations with group positive rates 0.1 / 0.9"""
import pytest
from scipy.stats import spearmanr

from config import DataConfig, ExperimentConfig, GrowingConfig, SyntheticSpec
from orchestrator import REWEIGHING, THREADS_ENV, UNMITIGATED, run_augmentation, run_mitigation, run_ssb, run_urb

pytestmark = pytest.mark.slow


def population(signal=1.0, seed=11):
    return DataConfig(synthetic=SyntheticSpec(n0=3000, n1=3000, pos_rate_a0=0.1, pos_rate_a1=0.9,
                                              signal=signal, seed=seed))


def config(**overrides):
    base = dict(data=population(), sizes=(30, 2000), repeats=30, importance_repeats=2, master_seed=3)
    base.update(overrides)
    return ExperimentConfig(**base)


@pytest.fixture(autouse=True)
def threads(monkeypatch):
    monkeypatch.setenv(THREADS_ENV, '4')


@pytest.fixture(scope='module')
def ssb_sweep():
    return run_ssb(config())


def test_small_samples_spread_discrimination(ssb_sweep):
    small = ssb_sweep.entry(30).metrics['SD']
    large = ssb_sweep.entry(2000).metrics['SD']
    assert small.std_disc > large.std_disc


def test_small_samples_raise_variance_and_loss(ssb_sweep):
    small = ssb_sweep.entry(30)
    large = ssb_sweep.entry(2000)
    for group in ('a0', 'a1'):
        assert small.decomposition['groups'][group]['raw_variance'] > large.decomposition['groups'][group]['raw_variance']
    zol_small, zol_large = small.metrics['ZOL'], large.metrics['ZOL']
    assert zol_small.cost_a0_mean + zol_small.cost_a1_mean > zol_large.cost_a0_mean + zol_large.cost_a1_mean


def test_group_only_signal_reaches_bayes_rate():
    result = run_ssb(config(data=population(signal=0.0), sizes=(2000,), repeats=5))
    entry = result.entry(2000)
    assert entry.metrics['SD'].mean_disc >= 0.9
    zol = entry.metrics['ZOL']
    assert zol.cost_a0_mean == pytest.approx(0.1, abs=0.04)
    assert zol.cost_a1_mean == pytest.approx(0.1, abs=0.04)


def test_reweighing_reduces_statistical_disparity():
    result = run_mitigation(config(sizes=(2000,), repeats=10))
    plain = result.entry(2000, UNMITIGATED).metrics['SD'].mean_disc
    weighted = result.entry(2000, REWEIGHING).metrics['SD'].mean_disc
    assert abs(plain) - abs(weighted) >= 0.2


def growing(selective):
    return config(
        experiment='augmentation',
        growing=GrowingConfig(fixed_group='a1', fixed_n=100, growing_sizes=(2, 100), selective=selective),
    )


def test_random_collection_widens_and_selective_collection_narrows():
    random_arm = run_augmentation(growing(selective=False))
    selective_arm = run_augmentation(growing(selective=True))
    random_small = random_arm.entry(2).metrics['SD'].mean_disc
    random_large = random_arm.entry(100).metrics['SD'].mean_disc
    selective_large = selective_arm.entry(100).metrics['SD'].mean_disc
    assert random_large - random_small >= 0.05
    assert selective_large <= random_large - 0.2


SEEDS = range(20)


def passing_seeds(check) -> int:
    return sum(bool(check(seed)) for seed in SEEDS)


def test_small_samples_attenuate_statistical_disparity_across_seeds():
    def attenuated(seed):
        result = run_ssb(config(metrics=('SD',), importance_repeats=1, master_seed=seed))
        small = result.entry(30).metrics['SD'].mean_disc
        large = result.entry(2000).metrics['SD'].mean_disc
        return large - small >= 0.1

    assert passing_seeds(attenuated) >= 19


def test_underrepresentation_moves_equal_opportunity_more_than_auc_and_loss():
    def eo_moves_most(seed):
        result = run_urb(config(metrics=('EO', 'AUC', 'ZOL'), splits=(0.01, 0.5), sample_size=1000,
                                importance_repeats=1, master_seed=seed))
        assert result.reference_index == 0.5
        metrics = result.entry(0.01).metrics
        eo = abs(metrics['EO'].mean_estimate)
        return eo > abs(metrics['AUC'].mean_estimate) and eo > abs(metrics['ZOL'].mean_estimate)

    assert passing_seeds(eo_moves_most) >= 18


def test_reweighing_gains_shrink_with_the_sample():
    def diluted(seed):
        result = run_mitigation(config(metrics=('SD',), importance_repeats=1, master_seed=seed))

        def gap(m):
            plain = result.entry(m, UNMITIGATED).metrics['SD'].mean_disc
            weighted = result.entry(m, REWEIGHING).metrics['SD'].mean_disc
            return abs(plain) - abs(weighted)

        return gap(2000) > gap(30)

    assert passing_seeds(diluted) >= 18


def test_sensitive_feature_importance_grows_with_the_collected_group():
    sizes = (2, 5, 10, 20, 50, 100)

    def rising(seed):
        result = run_augmentation(config(
            experiment='augmentation', metrics=('SD',), importance_repeats=1, master_seed=seed,
            growing=GrowingConfig(fixed_group='a1', fixed_n=100, growing_sizes=sizes),
        ))
        means = [result.entry(size).importance['permutation']['mean'] for size in sizes]
        return spearmanr(sizes, means)[0] > 0

    assert passing_seeds(rising) >= 18
