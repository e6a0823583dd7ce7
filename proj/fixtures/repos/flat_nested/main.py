from game.board import Board
from game.rules import check
from game.ai.engine import best_move


def main() -> None:
    board = Board()
    if check(board):
        print(best_move(board))


if __name__ == "__main__":
    main()
