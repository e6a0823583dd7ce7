import os

from game.board import Board
from game.render import draw
from game.rules import check


def main() -> None:
    board = Board()
    if check(board):
        draw(board)


if __name__ == "__main__":
    main()
