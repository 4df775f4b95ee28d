import contextlib
import sys

import progressbar as bar


def disable_widgets_if_not_interactive(kwargs):
    if not (sys.stdout.isatty() and sys.stderr.isatty()):
        # Disable all widgets if non-interactive
        kwargs['widgets'] = []


class ProgressBar(bar.ProgressBar):
    def __init__(self, *args, **kwargs):
        disable_widgets_if_not_interactive(kwargs)
        super().__init__(*args, **kwargs)


class NullBar(object):
    """ Stands in for a ProgressBar when progress is not wanted. """

    def update(self, value):
        pass


@contextlib.contextmanager
def iteration_bar(max_value, enabled):
    """ Progress bar over iteration steps, a no-op unless enabled. """
    if not enabled:
        yield NullBar()
        return

    b = ProgressBar(max_value=max_value, redirect_stdout=True)
    b.start()
    try:
        yield b
    finally:
        b.finish(end='\n')
