import threading

from stealpool.atomics import AtomicInt


def test_load_store():
    cell = AtomicInt(5)
    assert cell.load() == 5
    cell.store(-3)
    assert cell.load() == -3


def test_add_returns_new_value():
    cell = AtomicInt()
    assert cell.add(4) == 4
    assert cell.add(-1) == 3
    assert cell.load() == 3


def test_compare_and_set():
    cell = AtomicInt(10)
    assert cell.compare_and_set(10, 11)
    assert not cell.compare_and_set(10, 12)
    assert cell.load() == 11


def test_concurrent_adds_do_not_lose_updates():
    cell = AtomicInt()
    per_thread = 10_000

    def bump():
        for _ in range(per_thread):
            cell.add(1)

    threads = [threading.Thread(target=bump) for _ in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert cell.load() == 8 * per_thread


def test_concurrent_cas_single_winner_per_value():
    cell = AtomicInt()
    wins = [0] * 8

    def race(slot):
        for value in range(200):
            if cell.compare_and_set(value, value + 1):
                wins[slot] += 1

    threads = [threading.Thread(target=race, args=(i,)) for i in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    # every transition 0->1 .. 199->200 happened exactly once in total
    assert cell.load() == 200
    assert sum(wins) == 200
