#!/usr/bin/env python3
"""Write the bundled captioning showcase as a corpus directory.

Usage: python scripts/make_demo_corpus.py [directory]

The directory then works with both CLIs:

    ipredict simulate --corpus <directory> --scorer nbest
    ipredict serve    --corpus <directory> --scorer nbest --port 8000
"""

import sys

from ipredict.demo import write_demo_corpus

if __name__ == "__main__":
    target = sys.argv[1] if len(sys.argv) > 1 else "demo-corpus"
    write_demo_corpus(target)
    print(f"demo corpus written to {target}/")
