"""
Command-line execution file, `python -m cembed VERB ...`.
"""
from .cli import main

if __name__ == "__main__":
    main()
