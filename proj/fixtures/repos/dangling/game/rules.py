from game.board import Board


def check(board: Board) -> bool:
    return board.size > 0
