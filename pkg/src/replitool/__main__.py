from replitool.cli import run

run()
