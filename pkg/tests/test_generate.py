from roster_forge import random_instance, validate_instance


def test_same_seed_same_instance():
    first = random_instance(17, 3, 2, 4)
    second = random_instance(17, 3, 2, 4)
    assert first == second


def test_different_seeds_differ():
    instances = {str(random_instance(seed, 3, 2, 4)) for seed in range(10)}
    assert len(instances) > 1


def test_generated_instances_validate():
    for seed in range(60):
        instance = random_instance(seed, 1 + seed % 5, 1 + seed % 3, 1 + seed % 6)
        assert validate_instance(instance) == [], instance.name


def test_wild_instances_validate_too():
    for seed in range(60):
        instance = random_instance(seed, 1 + seed % 4, 1 + seed % 3, 1 + seed % 5, wild=True)
        assert validate_instance(instance) == [], instance.name


def test_dimensions_respected():
    instance = random_instance(3, 4, 3, 6)
    assert len(instance.nurses) == 4
    assert len(instance.shifts) == 3
    assert instance.horizon_days == 6
    assert instance.shifts[2].is_night
