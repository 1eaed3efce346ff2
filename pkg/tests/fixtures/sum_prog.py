"""Reads n, then n integers, prints their sum.  Line-buffered stdio."""
import sys


def main():
    n = int(sys.stdin.readline())
    total = 0
    for _ in range(n):
        total += int(sys.stdin.readline())
    print(total, flush=True)


if __name__ == "__main__":
    main()
