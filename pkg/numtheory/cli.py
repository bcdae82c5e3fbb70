"""Console entry point for the ``ppri`` command outside of manage.py."""

import os
import sys

from django.core.management.base import CommandError


def run(argv=None, stdout=None, stderr=None):
    """Run one invocation and return its exit code: 0 success, 1 domain error, 2 usage error."""
    from numtheory.management.commands.ppri import Command

    argv = sys.argv[1:] if argv is None else list(argv)
    stderr = sys.stderr if stderr is None else stderr
    command = Command(stdout=stdout, stderr=stderr)
    command._called_from_command_line = True
    parser = command.create_parser('ppri', 'ppri')
    parser.prog = 'ppri'
    try:
        options = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        command.handle(**vars(options))
    except CommandError as exc:
        command.stderr.write(str(exc))
        return exc.returncode
    return 0


def main():
    os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'numtheory_platform.settings')
    import django

    django.setup()
    sys.exit(run())
