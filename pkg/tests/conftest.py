import pytest

from disinfotriage import demo


@pytest.fixture(scope="session")
def demo_workspace(tmp_path_factory):
    """One shared demo workspace; tests must not mutate its store/ files.

    Tests that archive or enqueue point those paths at their own tmp dirs.
    """
    root = tmp_path_factory.mktemp("workspace")
    demo.make_workspace(root)
    return root
